#ifndef HSM_RATMAT_HPP
#define HSM_RATMAT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <vector>

namespace hsm {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using RatVec = std::vector<Rat>;

/// Dense matrix over the rationals.  Row-oriented; used for exact rank,
/// span-membership and kernel computations on model subspaces.
class RatMat {
public:
    RatMat() = default;
    RatMat(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, RatVec(cols)) {}
    explicit RatMat(std::vector<RatVec> rows) : rows_(std::move(rows)) {
        cols_ = rows_.empty() ? 0 : rows_[0].size();
    }

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    RatVec& row(std::size_t i) { return rows_[i]; }
    const RatVec& row(std::size_t i) const { return rows_[i]; }
    Rat& at(std::size_t i, std::size_t j) { return rows_[i][j]; }
    const Rat& at(std::size_t i, std::size_t j) const { return rows_[i][j]; }

    void push_row(RatVec r);
    void set_cols(std::size_t c) { cols_ = c; }

private:
    std::size_t cols_ = 0;
    std::vector<RatVec> rows_;
};

/// Row space of a matrix kept in reduced row-echelon form.  Supports exact
/// membership tests and incremental extension.
class RowSpace {
public:
    RowSpace() = default;
    explicit RowSpace(std::size_t cols) : cols_(cols) {}
    explicit RowSpace(const RatMat& m);

    std::size_t cols() const { return cols_; }
    std::size_t dim() const { return basis_.rows(); }
    const RatMat& basis() const { return basis_; }

    /// Reduces v against the basis; returns the residual.
    RatVec reduce(RatVec v) const;

    bool contains(const RatVec& v) const;

    /// Adds v if independent; returns true if the dimension grew.
    bool extend(RatVec v);

    bool contains_all(const RatMat& m) const;

private:
    std::size_t cols_ = 0;
    RatMat basis_;              // RREF rows
    std::vector<std::size_t> pivots_;
};

/// Basis of {x : M x = 0}, one kernel vector per row.
RatMat kernel(const RatMat& M);

std::size_t rank(const RatMat& M);

/// Clears denominators row-wise and divides by the gcd: the smallest
/// integer vector spanning the same line.
std::vector<BigInt> primitive_integer_row(const RatVec& v);

}  // namespace hsm

#endif
