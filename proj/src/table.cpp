#include "hsm/table.hpp"

#include <algorithm>
#include <numeric>

namespace hsm {

std::vector<int> checked_factor_set(const std::vector<int>& D, int m, const char* what) {
    std::vector<int> d = D;
    std::sort(d.begin(), d.end());
    if (std::adjacent_find(d.begin(), d.end()) != d.end())
        throw std::invalid_argument(std::string(what) + ": repeated factor index");
    for (int f : d)
        if (f < 1 || f > m)
            throw std::out_of_range(std::string(what) + ": factor index out of range");
    return d;
}

Table::Table(Shape shape, std::vector<Count> counts, const std::vector<Cell>& structural_zeros)
    : shape_(std::move(shape)), counts_(std::move(counts)), mask_(counts_.size(), 0) {
    if (counts_.size() != shape_.cell_count())
        throw std::invalid_argument("Table: counts size does not match shape");
    for (const Cell& z : structural_zeros) mask_[shape_.offset(z)] = 1;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] < 0) throw std::invalid_argument("Table: negative count");
        if (mask_[i] && counts_[i] != 0)
            throw std::invalid_argument("Table: nonzero count on a structural zero");
        total_ += counts_[i];
    }
}

Table::Table(Shape shape, std::vector<Count> counts, std::vector<char> mask)
    : shape_(std::move(shape)), counts_(std::move(counts)), mask_(std::move(mask)) {
    if (counts_.size() != shape_.cell_count() || mask_.size() != counts_.size())
        throw std::invalid_argument("Table: size mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] < 0) throw std::invalid_argument("Table: negative count");
        if (mask_[i] && counts_[i] != 0)
            throw std::invalid_argument("Table: nonzero count on a structural zero");
        total_ += counts_[i];
    }
}

std::size_t Table::support_dimension() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 0));
}

std::vector<std::size_t> Table::support() const {
    std::vector<std::size_t> s;
    s.reserve(support_dimension());
    for (std::size_t i = 0; i < mask_.size(); ++i)
        if (!mask_[i]) s.push_back(i);
    return s;
}

Table Table::marginal(const std::vector<int>& D) const {
    const int m = shape_.num_factors();
    std::vector<int> d = checked_factor_set(D, m, "marginal");

    std::vector<int> mlevels;
    mlevels.reserve(d.size());
    for (int f : d) mlevels.push_back(shape_.level(f));
    Shape mshape(mlevels);

    std::vector<Count> mcounts(mshape.cell_count(), 0);
    std::vector<char> mmask(mshape.cell_count(), 1);
    for (std::size_t off = 0; off < counts_.size(); ++off) {
        Cell c = shape_.cell_at(off);
        Cell mc(d.size());
        for (std::size_t j = 0; j < d.size(); ++j) mc[j] = c[static_cast<std::size_t>(d[j]) - 1];
        std::size_t moff = mshape.offset(mc);
        mcounts[moff] += counts_[off];
        if (!mask_[off]) mmask[moff] = 0;
    }
    return Table(mshape, std::move(mcounts), std::move(mmask));
}

Table Table::slice(const std::vector<int>& B, const Cell& j_B) const {
    const int m = shape_.num_factors();
    std::vector<int> b = checked_factor_set(B, m, "slice");
    if (j_B.size() != b.size()) throw std::invalid_argument("slice: level vector arity mismatch");
    // re-sort j_B along with B
    std::vector<std::pair<int, int>> bj;
    for (std::size_t j = 0; j < B.size(); ++j) bj.emplace_back(B[j], j_B[j]);
    std::sort(bj.begin(), bj.end());
    for (auto [f, l] : bj)
        if (l < 1 || l > shape_.level(f)) throw std::out_of_range("slice: invalid level");

    std::vector<int> rest;
    {
        std::vector<char> in_b(static_cast<std::size_t>(m) + 1, 0);
        for (auto [f, l] : bj) in_b[static_cast<std::size_t>(f)] = 1;
        for (int f = 1; f <= m; ++f)
            if (!in_b[static_cast<std::size_t>(f)]) rest.push_back(f);
    }
    std::vector<int> slevels;
    for (int f : rest) slevels.push_back(shape_.level(f));
    Shape sshape(slevels);

    std::vector<Count> scounts(sshape.cell_count(), 0);
    std::vector<char> smask(sshape.cell_count(), 0);
    for (std::size_t soff = 0; soff < scounts.size(); ++soff) {
        Cell sc = sshape.cell_at(soff);
        Cell full(static_cast<std::size_t>(m));
        for (std::size_t j = 0; j < rest.size(); ++j) full[static_cast<std::size_t>(rest[j]) - 1] = sc[j];
        for (auto [f, l] : bj) full[static_cast<std::size_t>(f) - 1] = l;
        std::size_t off = shape_.offset(full);
        scounts[soff] = counts_[off];
        smask[soff] = mask_[off];
    }
    return Table(sshape, std::move(scounts), std::move(smask));
}

}  // namespace hsm
