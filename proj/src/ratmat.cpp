#include "hsm/ratmat.hpp"

#include <stdexcept>

namespace hsm {

void RatMat::push_row(RatVec r) {
    if (rows_.empty() && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("RatMat::push_row: wrong length");
    rows_.push_back(std::move(r));
}

RowSpace::RowSpace(const RatMat& m) : cols_(m.cols()), basis_(0, m.cols()) {
    basis_.set_cols(cols_);
    for (std::size_t i = 0; i < m.rows(); ++i) extend(m.row(i));
}

RatVec RowSpace::reduce(RatVec v) const {
    if (v.size() != cols_) throw std::invalid_argument("RowSpace::reduce: wrong length");
    for (std::size_t i = 0; i < basis_.rows(); ++i) {
        std::size_t p = pivots_[i];
        if (v[p] == 0) continue;
        Rat f = v[p];  // basis rows have unit pivots
        const RatVec& b = basis_.row(i);
        for (std::size_t j = p; j < cols_; ++j)
            if (b[j] != 0) v[j] -= f * b[j];
    }
    return v;
}

bool RowSpace::contains(const RatVec& v) const {
    RatVec r = reduce(v);
    for (const Rat& x : r)
        if (x != 0) return false;
    return true;
}

bool RowSpace::extend(RatVec v) {
    RatVec r = reduce(std::move(v));
    std::size_t p = cols_;
    for (std::size_t j = 0; j < cols_; ++j)
        if (r[j] != 0) { p = j; break; }
    if (p == cols_) return false;
    Rat inv = r[p];
    for (std::size_t j = p; j < cols_; ++j)
        if (r[j] != 0) r[j] /= inv;
    // back-substitute into existing rows to keep full RREF
    for (std::size_t i = 0; i < basis_.rows(); ++i) {
        RatVec& b = basis_.row(i);
        if (b[p] == 0) continue;
        Rat f = b[p];
        for (std::size_t j = p; j < cols_; ++j)
            if (r[j] != 0) b[j] -= f * r[j];
    }
    // insert keeping pivot order
    std::size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < p) ++pos;
    RatMat nb(0, cols_);
    nb.set_cols(cols_);
    std::vector<std::size_t> np;
    for (std::size_t i = 0; i < pos; ++i) { nb.push_row(basis_.row(i)); np.push_back(pivots_[i]); }
    nb.push_row(std::move(r));
    np.push_back(p);
    for (std::size_t i = pos; i < basis_.rows(); ++i) { nb.push_row(basis_.row(i)); np.push_back(pivots_[i]); }
    basis_ = std::move(nb);
    pivots_ = std::move(np);
    return true;
}

bool RowSpace::contains_all(const RatMat& m) const {
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!contains(m.row(i))) return false;
    return true;
}

std::size_t rank(const RatMat& M) { return RowSpace(M).dim(); }

RatMat kernel(const RatMat& M) {
    const std::size_t n = M.cols();
    RowSpace rs(M);
    const RatMat& B = rs.basis();
    std::vector<std::size_t> pivots;
    std::vector<char> is_pivot(n, 0);
    for (std::size_t i = 0; i < B.rows(); ++i) {
        std::size_t p = 0;
        while (p < n && B.at(i, p) == 0) ++p;
        pivots.push_back(p);
        is_pivot[p] = 1;
    }
    RatMat K(0, n);
    K.set_cols(n);
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        RatVec v(n);
        v[f] = 1;
        for (std::size_t i = 0; i < B.rows(); ++i) v[pivots[i]] = -B.at(i, f);
        K.push_row(std::move(v));
    }
    return K;
}

std::vector<BigInt> primitive_integer_row(const RatVec& v) {
    BigInt lcm = 1;
    for (const Rat& x : v) {
        BigInt d = denominator(x);
        lcm = lcm / gcd(lcm, d) * d;
    }
    std::vector<BigInt> out;
    out.reserve(v.size());
    BigInt g = 0;
    for (const Rat& x : v) {
        BigInt e = numerator(x) * (lcm / denominator(x));
        out.push_back(e);
        g = gcd(g, e);
    }
    if (g > 1)
        for (BigInt& e : out) e /= g;
    return out;
}

}  // namespace hsm
