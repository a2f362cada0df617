#ifndef HSM_TABLE_HPP
#define HSM_TABLE_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsm {

using Count = long long;

/// 1-based cell coordinates (i_1,...,i_m).
using Cell = std::vector<int>;

/// Factor levels (I_1,...,I_m).  A degenerate shape with m = 0 represents
/// the single-cell table holding a grand total.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<int> levels) : levels_(std::move(levels)) {
        for (int l : levels_)
            if (l < 2) throw std::invalid_argument("Shape: every level must be >= 2");
    }

    int num_factors() const { return static_cast<int>(levels_.size()); }
    int level(int factor) const { return levels_.at(static_cast<std::size_t>(factor) - 1); }
    const std::vector<int>& levels() const { return levels_; }

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int l : levels_) n *= static_cast<std::size_t>(l);
        return n;
    }

    /// Row-major offset, last factor fastest, 1-based coordinates.
    std::size_t offset(const Cell& c) const {
        if (c.size() != levels_.size())
            throw std::invalid_argument("Shape::offset: wrong arity");
        std::size_t off = 0;
        for (std::size_t j = 0; j < levels_.size(); ++j) {
            if (c[j] < 1 || c[j] > levels_[j])
                throw std::out_of_range("Shape::offset: level out of range");
            off = off * static_cast<std::size_t>(levels_[j]) + static_cast<std::size_t>(c[j] - 1);
        }
        return off;
    }

    Cell cell_at(std::size_t off) const {
        Cell c(levels_.size());
        for (std::size_t j = levels_.size(); j-- > 0;) {
            c[j] = static_cast<int>(off % static_cast<std::size_t>(levels_[j])) + 1;
            off /= static_cast<std::size_t>(levels_[j]);
        }
        return c;
    }

    bool operator==(const Shape& o) const { return levels_ == o.levels_; }

private:
    std::vector<int> levels_;
};

/// Dense integer contingency table with a structural-zero mask.
/// Immutable after construction.
class Table {
public:
    Table(Shape shape, std::vector<Count> counts, const std::vector<Cell>& structural_zeros = {});
    Table(Shape shape, std::vector<Count> counts, std::vector<char> mask);

    const Shape& shape() const { return shape_; }
    std::size_t cell_count() const { return counts_.size(); }
    Count total() const { return total_; }

    Count at(std::size_t off) const { return counts_[off]; }
    Count at(const Cell& c) const { return counts_[shape_.offset(c)]; }
    bool masked(std::size_t off) const { return mask_[off] != 0; }
    bool masked(const Cell& c) const { return masked(shape_.offset(c)); }
    const std::vector<Count>& counts() const { return counts_; }
    const std::vector<char>& mask() const { return mask_; }

    /// Number of cells not marked structural-zero.
    std::size_t support_dimension() const;

    /// Offsets of unmasked cells, ascending.
    std::vector<std::size_t> support() const;

    /// D-marginal table; factors in D are kept in increasing order.
    /// D empty yields the 0-factor table holding n.
    /// A marginal cell is masked iff its entire preimage is masked.
    Table marginal(const std::vector<int>& D) const;

    /// Subtable fixing the factors in B at levels j_B; remaining factors
    /// keep their increasing order.  Mask is carried over.
    Table slice(const std::vector<int>& B, const Cell& j_B) const;

    Table with_counts(std::vector<Count> counts) const { return Table(shape_, std::move(counts), mask_); }

private:
    Shape shape_;
    std::vector<Count> counts_;
    std::vector<char> mask_;
    Count total_ = 0;
};

/// Validates D as a set of distinct factor indices in [1, m]; returns it sorted.
std::vector<int> checked_factor_set(const std::vector<int>& D, int m, const char* what);

}  // namespace hsm

#endif
