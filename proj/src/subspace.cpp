#include "hsm/subspace.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace hsm {

static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

static Shape marginal_shape(const Shape& s, VertexSet D) {
    std::vector<int> levels;
    for (int f : D.members()) levels.push_back(s.level(f));
    return Shape(levels);
}

/// Offset of the D-marginal cell of `full` within marginal_shape(s, D).
static std::size_t marg_offset(const Shape& s, const Cell& full, VertexSet D) {
    std::size_t off = 0;
    for (int f : D.members())
        off = off * static_cast<std::size_t>(s.level(f)) +
              static_cast<std::size_t>(full[static_cast<std::size_t>(f) - 1] - 1);
    return off;
}

Subspace::Subspace(Shape shape, std::vector<char> mask)
    : shape_(std::move(shape)), mask_(std::move(mask)) {
    if (mask_.empty()) mask_.assign(shape_.cell_count(), 0);
    if (mask_.size() != shape_.cell_count())
        throw std::invalid_argument("Subspace: mask size mismatch");
    support_pos_.assign(shape_.cell_count(), npos);
    for (std::size_t off = 0; off < mask_.size(); ++off) {
        if (mask_[off]) continue;
        support_pos_[off] = support_.size();
        support_.push_back(off);
    }
    if (support_.empty()) throw std::invalid_argument("Subspace: empty support");
    space_ = RowSpace(support_.size());
    add_generator(std::vector<long long>(support_.size(), 1),
                  Term{TermKind::Constant, {}, {}, {}, "constant"});
}

bool Subspace::masked() const {
    return support_.size() != shape_.cell_count();
}

std::size_t Subspace::support_position(std::size_t full_offset) const {
    return support_pos_[full_offset];
}

bool Subspace::add_generator(std::vector<long long> gen, Term term) {
    RatVec v(gen.size());
    for (std::size_t i = 0; i < gen.size(); ++i) v[i] = gen[i];
    if (!space_.extend(std::move(v))) return false;
    int_gens_.push_back(std::move(gen));
    terms_.push_back(std::move(term));
    return true;
}

std::vector<std::vector<std::size_t>> Subspace::support_classes(VertexSet D) const {
    Shape ms = marginal_shape(shape_, D);
    std::vector<std::vector<std::size_t>> classes(ms.cell_count());
    for (std::size_t k = 0; k < support_.size(); ++k) {
        Cell c = shape_.cell_at(support_[k]);
        classes[marg_offset(shape_, c, D)].push_back(k);
    }
    return classes;
}

void Subspace::add_interaction(VertexSet D) {
    if (!D.subset_of(VertexSet::full(num_factors())))
        throw std::out_of_range("add_interaction: factors outside [m]");
    for (const auto& cls : support_classes(D)) {
        if (cls.empty()) continue;
        std::vector<long long> g(support_.size(), 0);
        for (std::size_t k : cls) g[k] = 1;
        add_generator(std::move(g),
                      Term{D.count() == 1 ? TermKind::MainEffect : TermKind::Interaction,
                           D, {}, {}, "L_" + D.str()});
    }
}

void Subspace::add_covariate(VertexSet D, const std::vector<long long>& phi, std::string name) {
    Shape ms = marginal_shape(shape_, D);
    if (phi.size() != ms.cell_count())
        throw std::invalid_argument("add_covariate: phi size does not match I_D");
    std::vector<long long> g(support_.size(), 0);
    for (std::size_t k = 0; k < support_.size(); ++k) {
        Cell c = shape_.cell_at(support_[k]);
        g[k] = phi[marg_offset(shape_, c, D)];
    }
    add_generator(std::move(g), Term{TermKind::Covariate, D, {}, {}, std::move(name)});
}

void Subspace::add_csi(VertexSet D, VertexSet B, const Cell& j_B) {
    VertexSet full = VertexSet::full(num_factors());
    if (!D.subset_of(full) || !B.subset_of(full))
        throw std::out_of_range("add_csi: factors outside [m]");
    std::vector<int> bmembers = B.members();
    if (j_B.size() != bmembers.size())
        throw std::invalid_argument("add_csi: level arity mismatch");
    for (std::size_t j = 0; j < bmembers.size(); ++j)
        if (j_B[j] < 1 || j_B[j] > shape_.level(bmembers[j]))
            throw std::out_of_range("add_csi: invalid level");
    if (B.empty()) { add_interaction(D); return; }

    VertexSet DminusB = D.minus(B);
    Shape ms = DminusB.empty() ? Shape(std::vector<int>{}) : marginal_shape(shape_, DminusB);
    std::vector<std::vector<std::size_t>> classes(ms.cell_count());
    for (std::size_t k = 0; k < support_.size(); ++k) {
        Cell c = shape_.cell_at(support_[k]);
        bool in_slice = true;
        for (std::size_t j = 0; j < bmembers.size(); ++j)
            if (c[static_cast<std::size_t>(bmembers[j]) - 1] != j_B[j]) { in_slice = false; break; }
        if (!in_slice) continue;
        classes[DminusB.empty() ? 0 : marg_offset(shape_, c, DminusB)].push_back(k);
    }
    for (const auto& cls : classes) {
        if (cls.empty()) continue;
        std::vector<long long> g(support_.size(), 0);
        for (std::size_t k : cls) g[k] = 1;
        add_generator(std::move(g),
                      Term{TermKind::CSI, D, B, j_B, "L_" + D.str() + "^" + B.str()});
    }
}

void Subspace::add_uniform_association(VertexSet D) {
    if (D.count() != 2) throw std::invalid_argument("add_uniform_association: |D| must be 2");
    Shape ms = marginal_shape(shape_, D);
    std::vector<long long> phi(ms.cell_count());
    for (std::size_t off = 0; off < phi.size(); ++off) {
        Cell c = ms.cell_at(off);
        phi[off] = static_cast<long long>(c[0]) * c[1];
    }
    add_covariate(D, phi, "uniform_assoc");
}

void Subspace::add_change_point(VertexSet D, int cut_i, int cut_j) {
    if (D.count() != 2) throw std::invalid_argument("add_change_point: |D| must be 2");
    Shape ms = marginal_shape(shape_, D);
    if (cut_i < 1 || cut_i >= ms.level(1) || cut_j < 1 || cut_j >= ms.level(2))
        throw std::invalid_argument("add_change_point: cut outside [1, I-1]");
    std::vector<long long> phi(ms.cell_count());
    for (std::size_t off = 0; off < phi.size(); ++off) {
        Cell c = ms.cell_at(off);
        phi[off] = (c[0] <= cut_i && c[1] <= cut_j) ? 1 : 0;
    }
    add_covariate(D, phi, "change_point");
}

void Subspace::add_diagonal(VertexSet D) {
    if (D.count() != 2) throw std::invalid_argument("add_diagonal: |D| must be 2");
    Shape ms = marginal_shape(shape_, D);
    if (ms.level(1) != ms.level(2))
        throw std::invalid_argument("add_diagonal: factors must have equal levels");
    for (int l = 1; l <= ms.level(1); ++l) {
        std::vector<long long> phi(ms.cell_count(), 0);
        phi[ms.offset({l, l})] = 1;
        add_covariate(D, phi, "diag");
    }
}

Subspace Subspace::hierarchical(const Shape& shape, const Complex& delta,
                                std::vector<char> mask) {
    if (delta.m() != shape.num_factors())
        throw std::invalid_argument("hierarchical: complex arity mismatch");
    Subspace L(shape, std::move(mask));
    for (VertexSet F : delta.facets()) L.add_interaction(F);
    return L;
}

Subspace Subspace::main_effects(const Shape& shape, std::vector<char> mask) {
    Subspace L(shape, std::move(mask));
    for (int f = 1; f <= shape.num_factors(); ++f) L.add_interaction(VertexSet::of({f}));
    return L;
}

bool Subspace::is_saturated(VertexSet D) const {
    for (const auto& cls : support_classes(D)) {
        if (cls.empty()) continue;
        RatVec v(support_.size());
        for (std::size_t k : cls) v[k] = 1;
        if (!space_.contains(v)) return false;
    }
    return true;
}

RatMat Subspace::intersect_marginal(VertexSet D) const {
    const RatMat& B = space_.basis();
    const std::size_t k = B.rows();
    RatMat constraints(0, k);
    constraints.set_cols(k);
    for (const auto& cls : support_classes(D)) {
        for (std::size_t t = 1; t < cls.size(); ++t) {
            RatVec row(k);
            for (std::size_t r = 0; r < k; ++r)
                row[r] = B.at(r, cls[t]) - B.at(r, cls[0]);
            constraints.push_row(std::move(row));
        }
    }
    RatMat coeff = kernel(constraints);
    RatMat out(0, support_.size());
    out.set_cols(support_.size());
    for (std::size_t i = 0; i < coeff.rows(); ++i) {
        RatVec v(support_.size());
        for (std::size_t r = 0; r < k; ++r) {
            if (coeff.at(i, r) == 0) continue;
            for (std::size_t c = 0; c < support_.size(); ++c)
                if (B.at(r, c) != 0) v[c] += coeff.at(i, r) * B.at(r, c);
        }
        out.push_row(std::move(v));
    }
    return out;
}

RatMat Subspace::intersect_slice(VertexSet Bset, const Cell& j_B) const {
    const RatMat& B = space_.basis();
    const std::size_t k = B.rows();
    std::vector<int> bmembers = Bset.members();
    RatMat constraints(0, k);
    constraints.set_cols(k);
    for (std::size_t c = 0; c < support_.size(); ++c) {
        Cell cell = shape_.cell_at(support_[c]);
        bool in_slice = true;
        for (std::size_t j = 0; j < bmembers.size(); ++j)
            if (cell[static_cast<std::size_t>(bmembers[j]) - 1] != j_B[j]) { in_slice = false; break; }
        if (in_slice) continue;
        RatVec row(k);
        for (std::size_t r = 0; r < k; ++r) row[r] = B.at(r, c);
        constraints.push_row(std::move(row));
    }
    RatMat coeff = kernel(constraints);
    RatMat out(0, support_.size());
    out.set_cols(support_.size());
    for (std::size_t i = 0; i < coeff.rows(); ++i) {
        RatVec v(support_.size());
        for (std::size_t r = 0; r < k; ++r) {
            if (coeff.at(i, r) == 0) continue;
            for (std::size_t c = 0; c < support_.size(); ++c)
                if (B.at(r, c) != 0) v[c] += coeff.at(i, r) * B.at(r, c);
        }
        out.push_row(std::move(v));
    }
    return out;
}

bool Subspace::is_conformal(const std::vector<VertexSet>& parts) const {
    RowSpace acc(support_.size());
    for (VertexSet p : parts) {
        RatMat inter = intersect_marginal(p);
        for (std::size_t i = 0; i < inter.rows(); ++i) acc.extend(inter.row(i));
    }
    return acc.dim() == space_.dim();
}

bool is_conformal(const Subspace& L, const std::vector<VertexSet>& parts) {
    return L.is_conformal(parts);
}

bool Subspace::slice_decomposes(VertexSet Z) const {
    Shape zs = marginal_shape(shape_, Z);
    RowSpace acc(support_.size());
    for (std::size_t off = 0; off < zs.cell_count(); ++off) {
        Cell j = zs.cell_at(off);
        RatMat inter = intersect_slice(Z, j);
        for (std::size_t i = 0; i < inter.rows(); ++i) acc.extend(inter.row(i));
    }
    return acc.dim() == space_.dim();
}

bool Subspace::contains(const Subspace& other) const {
    if (!(shape_ == other.shape_) || support_ != other.support_)
        throw std::invalid_argument("Subspace::contains: incompatible supports");
    return space_.contains_all(other.space_.basis());
}

bool Subspace::same_space(const Subspace& other) const {
    return dim() == other.dim() && contains(other);
}

// ---------------------------------------------------------------------------
// decomposition machinery

/// Shared search state for decompose / connected_components: caches the
/// intersection bases L ∩ L_D and saturation verdicts.
struct DecomposeSearch {
    const Subspace& L;
    std::map<VertexSet, RatMat> inter_cache;
    std::map<VertexSet, char> sat_cache;

    explicit DecomposeSearch(const Subspace& l) : L(l) {}

    const RatMat& inter(VertexSet D) {
        auto it = inter_cache.find(D);
        if (it != inter_cache.end()) return it->second;
        return inter_cache.emplace(D, L.intersect_marginal(D)).first->second;
    }

    bool saturated(VertexSet S) {
        auto it = sat_cache.find(S);
        if (it != sat_cache.end()) return it->second != 0;
        bool s = L.is_saturated(S);
        sat_cache.emplace(S, s ? 1 : 0);
        return s;
    }

    std::size_t inter_dim(VertexSet D) { return RowSpace(inter(D)).dim(); }

    bool conformal_pair(VertexSet W, VertexSet V1, VertexSet V2) {
        RowSpace acc(L.support().size());
        const RatMat& a = inter(V1);
        for (std::size_t i = 0; i < a.rows(); ++i) acc.extend(a.row(i));
        const RatMat& b = inter(V2);
        for (std::size_t i = 0; i < b.rows(); ++i) acc.extend(b.row(i));
        std::size_t target = (W == VertexSet::full(L.num_factors()))
                                 ? static_cast<std::size_t>(L.dim())
                                 : inter_dim(W);
        return acc.dim() == target;
    }

    /// Support join condition: the W-projected support equals the join of
    /// the V1- and V2-projections over S = V1 ∩ V2.  On a full (unmasked)
    /// support this always holds.
    bool join_ok(VertexSet V1, VertexSet V2, VertexSet W) {
        if (!L.masked()) return true;
        VertexSet S = V1 & V2;
        VertexSet A1 = V1.minus(S), A2 = V2.minus(S);
        const Shape& shape = L.shape();
        Shape sshape = S.empty() ? Shape(std::vector<int>{}) : marginal_shape(shape, S);
        std::map<std::size_t, std::set<std::size_t>> p1, p2;  // i_S -> {i_A}
        std::set<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> pw;
        for (std::size_t off : L.support()) {
            Cell c = shape.cell_at(off);
            std::size_t s = S.empty() ? 0 : marg_offset(shape, c, S);
            std::size_t a1 = A1.empty() ? 0 : marg_offset(shape, c, A1);
            std::size_t a2 = A2.empty() ? 0 : marg_offset(shape, c, A2);
            p1[s].insert(a1);
            p2[s].insert(a2);
            pw.insert({s, {a1, a2}});
        }
        (void)sshape;
        for (const auto& [s, as] : p1) {
            const auto& bs = p2[s];
            for (std::size_t a : as)
                for (std::size_t b : bs)
                    if (!pw.count({s, {a, b}})) return false;
        }
        return true;
    }

    /// Extended-compact-component recursion per the separator definition.
    void rec(VertexSet W, std::vector<VertexSet>& out) {
        if (W.count() >= 3) {
            // candidate separators by increasing cardinality, then lex
            std::vector<VertexSet> cands;
            std::uint32_t wb = W.bits;
            for (std::uint32_t s = wb; s; s = (s - 1) & wb) {
                VertexSet S(s);
                if (W.minus(S).count() >= 2) cands.push_back(S);
            }
            std::sort(cands.begin(), cands.end(), [](VertexSet a, VertexSet b) {
                if (a.count() != b.count()) return a.count() < b.count();
                return a.bits < b.bits;
            });
            for (VertexSet S : cands) {
                if (!saturated(S)) continue;
                VertexSet R = W.minus(S);
                int anchor = R.min_vertex();
                std::uint32_t rb = R.bits;
                for (std::uint32_t a = rb; a; a = (a - 1) & rb) {
                    VertexSet A1(a);
                    if (!A1.contains(anchor) || A1 == R) continue;
                    VertexSet A2 = R.minus(A1);
                    VertexSet V1 = A1 | S, V2 = A2 | S;
                    if (!join_ok(V1, V2, W)) continue;
                    if (!conformal_pair(W, V1, V2)) continue;
                    rec(V1, out);
                    rec(V2, out);
                    return;
                }
            }
        }
        out.push_back(W);
    }

    /// Connectedness recursion (empty separator).
    void connected_rec(VertexSet W, std::vector<VertexSet>& out) {
        if (W.count() >= 2) {
            int anchor = W.min_vertex();
            std::uint32_t wb = W.bits;
            for (std::uint32_t a = wb; a; a = (a - 1) & wb) {
                VertexSet A(a);
                if (!A.contains(anchor) || A == W) continue;
                VertexSet B = W.minus(A);
                if (!join_ok(A, B, W)) continue;
                if (!conformal_pair(W, A, B)) continue;
                connected_rec(A, out);
                connected_rec(B, out);
                return;
            }
        }
        out.push_back(W);
    }
};

std::vector<VertexSet> Subspace::connected_components() const {
    if (num_factors() > 12)
        throw std::invalid_argument("connected_components: m > 12 unsupported");
    DecomposeSearch s(*this);
    std::vector<VertexSet> out;
    s.connected_rec(VertexSet::full(num_factors()), out);
    std::sort(out.begin(), out.end());
    return out;
}

static std::vector<VertexSet> reduce_maximal_sets(std::vector<VertexSet> sets) {
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    std::vector<VertexSet> out;
    for (VertexSet e : sets) {
        bool dominated = false;
        for (VertexSet f : sets)
            if (f != e && e.subset_of(f)) { dominated = true; break; }
        if (!dominated) out.push_back(e);
    }
    return out;
}

ModelDecomposition decompose(const Subspace& L) {
    if (L.num_factors() > 12)
        throw std::invalid_argument("decompose: m > 12 unsupported");
    DecomposeSearch s(L);
    std::vector<VertexSet> comps;
    std::vector<VertexSet> parts;
    s.connected_rec(VertexSet::full(L.num_factors()), parts);
    for (VertexSet part : parts) s.rec(part, comps);
    comps = reduce_maximal_sets(std::move(comps));

    Complex H = Complex::raw(L.num_factors(), comps);
    Decomposition order = junction_tree(H);  // throws if H is cyclic

    ModelDecomposition d;
    d.components = order.components;
    d.dividers = order.dividers;
    for (VertexSet S : d.dividers)
        if (!s.saturated(S))
            throw std::runtime_error("decompose: divider not saturated (internal error)");
    for (VertexSet C : d.components) d.component_models.push_back(L.project(C));
    return d;
}

std::pair<Complex, Decomposition> ambient_decomposable(const Subspace& L) {
    ModelDecomposition d = decompose(L);
    std::vector<std::vector<int>> facets;
    for (VertexSet C : d.components) facets.push_back(C.members());
    Complex H(L.num_factors(), facets);
    if (!is_acyclic(H))
        throw std::runtime_error("ambient_decomposable: component complex is cyclic (internal error)");
    Decomposition order;
    order.components = d.components;
    order.dividers = d.dividers;
    return {H, order};
}

Subspace Subspace::project(VertexSet C) const {
    Shape ms = marginal_shape(shape_, C);
    auto classes = support_classes(C);
    std::vector<char> mmask(ms.cell_count(), 1);
    for (std::size_t off = 0; off < classes.size(); ++off)
        if (!classes[off].empty()) mmask[off] = 0;

    RatMat inter = intersect_marginal(C);
    Subspace out(ms, mmask);
    for (std::size_t i = 0; i < inter.rows(); ++i) {
        RatVec vals;
        vals.reserve(ms.cell_count());
        for (std::size_t off = 0; off < classes.size(); ++off)
            if (!classes[off].empty()) vals.push_back(inter.at(i, classes[off][0]));
        std::vector<BigInt> prim = primitive_integer_row(vals);
        std::vector<long long> g;
        g.reserve(prim.size());
        for (const BigInt& x : prim) {
            if (x > std::numeric_limits<long long>::max() || x < std::numeric_limits<long long>::min())
                throw std::overflow_error("project: generator entry exceeds 64 bits");
            g.push_back(static_cast<long long>(x));
        }
        out.add_generator(std::move(g), Term{TermKind::Covariate, {}, {}, {}, "projected"});
    }
    return out;
}

Subspace Subspace::project_slice(VertexSet B, const Cell& j_B) const {
    std::vector<int> bmembers = B.members();
    VertexSet rest = VertexSet::full(num_factors()).minus(B);
    Shape ss = marginal_shape(shape_, rest);

    // map support cells in the slice to slice offsets
    std::vector<std::size_t> slice_support_pos;  // positions into support_
    std::vector<char> smask(ss.cell_count(), 1);
    std::vector<std::size_t> slice_offsets;
    for (std::size_t k = 0; k < support_.size(); ++k) {
        Cell c = shape_.cell_at(support_[k]);
        bool in_slice = true;
        for (std::size_t j = 0; j < bmembers.size(); ++j)
            if (c[static_cast<std::size_t>(bmembers[j]) - 1] != j_B[j]) { in_slice = false; break; }
        if (!in_slice) continue;
        std::size_t soff = marg_offset(shape_, c, rest);
        smask[soff] = 0;
        slice_support_pos.push_back(k);
        slice_offsets.push_back(soff);
    }

    RatMat inter = intersect_slice(B, j_B);
    Subspace out(ss, smask);
    for (std::size_t i = 0; i < inter.rows(); ++i) {
        // order values by ascending slice offset (the new support order)
        std::vector<std::pair<std::size_t, std::size_t>> order;
        for (std::size_t t = 0; t < slice_offsets.size(); ++t)
            order.push_back({slice_offsets[t], slice_support_pos[t]});
        std::sort(order.begin(), order.end());
        RatVec vals;
        for (auto [soff, k] : order) vals.push_back(inter.at(i, k));
        std::vector<BigInt> prim = primitive_integer_row(vals);
        std::vector<long long> g;
        for (const BigInt& x : prim) {
            if (x > std::numeric_limits<long long>::max() || x < std::numeric_limits<long long>::min())
                throw std::overflow_error("project_slice: generator entry exceeds 64 bits");
            g.push_back(static_cast<long long>(x));
        }
        out.add_generator(std::move(g), Term{TermKind::Covariate, {}, {}, {}, "slice"});
    }
    return out;
}

std::optional<Complex> Subspace::hierarchical_structure() const {
    const int m = num_factors();
    if (m > 12) return std::nullopt;
    std::vector<char> sat(1u << m, 0), known(1u << m, 0);
    sat[0] = known[0] = 1;
    // monotone: D saturated requires all |D|-1 subsets saturated
    std::vector<std::uint32_t> by_size[17];
    for (std::uint32_t b = 1; b < (1u << m); ++b)
        by_size[__builtin_popcount(b)].push_back(b);
    for (int sz = 1; sz <= m; ++sz) {
        for (std::uint32_t b : by_size[sz]) {
            bool subs_ok = true;
            for (int v = 0; v < m && subs_ok; ++v)
                if ((b >> v) & 1u) subs_ok = sat[b & ~(1u << v)];
            sat[b] = subs_ok && is_saturated(VertexSet(b));
            known[b] = 1;
        }
    }
    std::vector<VertexSet> facets;
    for (std::uint32_t b = 1; b < (1u << m); ++b) {
        if (!sat[b]) continue;
        bool maximal = true;
        for (int v = 0; v < m && maximal; ++v)
            if (!((b >> v) & 1u) && sat[b | (1u << v)]) maximal = false;
        if (maximal) facets.push_back(VertexSet(b));
    }
    Complex delta = Complex(m, facets);
    Subspace H = hierarchical(shape_, delta, mask_);
    if (H.dim() == dim()) return delta;
    return std::nullopt;
}

Complex Subspace::hierarchical_closure() const {
    if (masked())
        throw std::invalid_argument(
            "hierarchical_closure: undefined on masked supports");
    const int m = num_factors();
    if (m > 12) throw std::invalid_argument("hierarchical_closure: m > 12 unsupported");
    const std::size_t n = shape_.cell_count();

    // averaging operator over factor f
    auto average_factor = [&](const RatVec& v, int f) {
        RatVec out(n);
        int lev = shape_.level(f);
        for (std::size_t off = 0; off < n; ++off) {
            Cell c = shape_.cell_at(off);
            Rat sum = 0;
            for (int l = 1; l <= lev; ++l) {
                c[static_cast<std::size_t>(f) - 1] = l;
                sum += v[shape_.offset(c)];
            }
            out[off] = sum / lev;
        }
        return out;
    };

    std::set<VertexSet> active;
    const RatMat& B = space_.basis();
    for (std::size_t r = 0; r < B.rows(); ++r) {
        for (std::uint32_t db = 1; db < (1u << m); ++db) {
            VertexSet D(db);
            if (active.count(D)) continue;
            // skip if already dominated by an active superset
            bool dominated = false;
            for (VertexSet a : active)
                if (D.subset_of(a)) { dominated = true; break; }
            if (dominated) continue;
            RatVec v = B.row(r);
            for (int f = 1; f <= m; ++f) {
                RatVec avg = average_factor(v, f);
                if (D.contains(f)) {
                    for (std::size_t i = 0; i < n; ++i) v[i] -= avg[i];
                } else {
                    v = std::move(avg);
                }
            }
            bool nonzero = false;
            for (const Rat& x : v)
                if (x != 0) { nonzero = true; break; }
            if (nonzero) active.insert(D);
        }
    }
    return Complex(m, std::vector<VertexSet>(active.begin(), active.end()));
}

bool Subspace::is_hsm_of(const Complex& delta) const {
    Subspace H = hierarchical(shape_, delta, mask_);
    if (!H.contains(*this)) return false;
    // decompose each connected part of red(delta)
    std::vector<VertexSet> all_components;
    std::vector<VertexSet> all_dividers;
    for (VertexSet part : connected_vertex_components(delta)) {
        Decomposition d = maximal_compact_components(induced(delta, part));
        all_components.insert(all_components.end(), d.components.begin(), d.components.end());
        all_dividers.insert(all_dividers.end(), d.dividers.begin(), d.dividers.end());
    }
    for (VertexSet S : all_dividers)
        if (!is_saturated(S)) return false;
    return is_conformal(all_components);
}

bool Subspace::is_tight_hsm() const {
    return is_hsm_of(hierarchical_closure());
}

std::vector<long long> Subspace::marginal_indicator(VertexSet D, std::size_t moff) const {
    std::vector<long long> g(support_.size(), 0);
    for (std::size_t k = 0; k < support_.size(); ++k) {
        Cell c = shape_.cell_at(support_[k]);
        if (marg_offset(shape_, c, D) == moff) g[k] = 1;
    }
    return g;
}

// ---------------------------------------------------------------------------
// split models

Subspace split_model(const Shape& shape, const SplitSpec& spec, std::vector<char> mask) {
    const Complex& root = spec.root;
    if (!is_acyclic(root))
        throw std::invalid_argument("split_model: root complex is not decomposable");
    Subspace L(shape, std::move(mask));

    for (VertexSet C : root.facets()) {
        VertexSet Z;
        if (auto it = spec.Z.find(C); it != spec.Z.end()) Z = it->second;
        if (!Z.subset_of(C)) throw std::invalid_argument("split_model: Z(C) must lie inside C");
        VertexSet rest = C.minus(Z);

        std::vector<Cell> zlevels;
        if (Z.empty()) {
            zlevels.push_back(Cell{});
        } else {
            Shape zs = marginal_shape(shape, Z);
            for (std::size_t off = 0; off < zs.cell_count(); ++off)
                zlevels.push_back(zs.cell_at(off));
        }

        for (const Cell& j : zlevels) {
            std::vector<VertexSet> cliques;
            if (auto it = spec.slice_complexes.find({C, j}); it != spec.slice_complexes.end())
                cliques = it->second;
            else
                cliques = {rest};

            VertexSet covered;
            for (VertexSet D : cliques) {
                if (!D.subset_of(rest))
                    throw std::invalid_argument("split_model: slice clique outside C \\ Z(C)");
                covered = covered | D;
            }
            if (covered != rest)
                throw std::invalid_argument("split_model: slice complex must cover C \\ Z(C)");

            // saturation condition on clique intersections
            for (VertexSet Cp : root.facets()) {
                if (Cp == C) continue;
                VertexSet need = (C & Cp).minus(Z);
                bool ok = need.empty();
                for (VertexSet D : cliques)
                    if (need.subset_of(D)) { ok = true; break; }
                if (!ok)
                    throw std::invalid_argument(
                        "split_model: saturation condition violated for cliques " + C.str() +
                        " and " + Cp.str());
            }

            for (VertexSet D : cliques) L.add_csi(D, Z, j);
        }
    }
    return L;
}

}  // namespace hsm
