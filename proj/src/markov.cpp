#include "hsm/markov.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <cstring>
#include <set>
#include <sstream>
#include <unordered_map>

#ifdef HSM_HAVE_OPENMP
#include <omp.h>
#endif

namespace hsm {

// ---------------------------------------------------------------------------
// Move basics

int Move::degree() const {
    int d = 0;
    for (auto [off, c] : entries)
        if (c > 0) d += c;
    return d;
}

Move Move::canonical() const {
    std::map<std::size_t, int> acc;
    for (auto [off, c] : entries) acc[off] += c;
    Move m;
    for (auto [off, c] : acc)
        if (c != 0) m.entries.push_back({off, c});
    if (!m.entries.empty() && m.entries.front().second < 0)
        for (auto& [off, c] : m.entries) c = -c;
    return m;
}

static void dedupe(std::vector<Move>& moves) {
    for (Move& m : moves) m = m.canonical();
    std::sort(moves.begin(), moves.end());
    moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
    moves.erase(std::remove_if(moves.begin(), moves.end(),
                               [](const Move& m) { return m.entries.empty(); }),
                moves.end());
}

std::uint64_t configuration_fingerprint(const Subspace& L) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(L.num_factors()));
    for (int l : L.shape().levels()) mix(static_cast<std::uint64_t>(l));
    for (char c : L.mask()) mix(static_cast<std::uint64_t>(c));
    mix(L.generators().size());
    for (const auto& g : L.generators())
        for (long long v : g) mix(static_cast<std::uint64_t>(v));
    return h;
}

void validate_basis(const MarkovBasis& B, const Subspace& L) {
    for (std::size_t i = 0; i < B.moves.size(); ++i) {
        const Move& m = B.moves[i];
        for (auto [off, c] : m.entries) {
            (void)c;
            if (off >= L.mask().size() || L.mask()[off])
                throw std::invalid_argument("validate_basis: move " + std::to_string(i) +
                                            " touches a masked or out-of-range cell");
        }
        for (const auto& g : L.generators()) {
            long long s = 0;
            for (auto [off, c] : m.entries) s += g[L.support_position(off)] * c;
            if (s != 0)
                throw std::invalid_argument("validate_basis: move " + std::to_string(i) +
                                            " violates A z = 0 (residual " + std::to_string(s) +
                                            ")");
        }
    }
}

// ---------------------------------------------------------------------------
// marginal-table helpers (moves over marginal offsets with original labels)

static Shape marginal_shape(const Shape& s, VertexSet D) {
    std::vector<int> levels;
    for (int f : D.members()) levels.push_back(s.level(f));
    return Shape(levels);
}

static std::size_t marg_offset(const Shape& s, const Cell& full, VertexSet D) {
    std::size_t off = 0;
    for (int f : D.members())
        off = off * static_cast<std::size_t>(s.level(f)) +
              static_cast<std::size_t>(full[static_cast<std::size_t>(f) - 1] - 1);
    return off;
}

/// Marginal mask: a marginal cell is masked iff its entire preimage is masked.
static std::vector<char> marginal_mask(const Shape& full, const std::vector<char>& mask,
                                       VertexSet D) {
    Shape ms = marginal_shape(full, D);
    std::vector<char> out(ms.cell_count(), 1);
    for (std::size_t off = 0; off < mask.size(); ++off) {
        if (mask[off]) continue;
        out[marg_offset(full, full.cell_at(off), D)] = 0;
    }
    return out;
}

/// Offset in marginal_shape(full, V) of the cell assembled from the three
/// disjoint coordinate groups (each group's cell ordered by ascending factor).
static std::size_t compose_offset(const Shape& full, VertexSet V, VertexSet A1, const Cell& c1,
                                  VertexSet S, const Cell& cs, VertexSet A2, const Cell& c2) {
    std::size_t off = 0;
    std::size_t p1 = 0, ps = 0, p2 = 0;
    for (int f : V.members()) {
        int coord;
        if (A1.contains(f))
            coord = c1[p1++];
        else if (S.contains(f))
            coord = cs[ps++];
        else {
            coord = c2[p2++];
            (void)A2;
        }
        off = off * static_cast<std::size_t>(full.level(f)) + static_cast<std::size_t>(coord - 1);
    }
    return off;
}

// ---------------------------------------------------------------------------
// fiber oracle

Fiber fiber_enumerate(const Subspace& L, const Table& t, std::size_t cap) {
    const auto& sup = L.support();
    const std::size_t s = sup.size();
    std::vector<long long> b;
    for (const auto& g : L.generators()) {
        long long v = 0;
        for (std::size_t k = 0; k < s; ++k) v += g[k] * t.at(sup[k]);
        b.push_back(v);
    }
    Count n = t.total();
    Fiber F;
    std::vector<Count> cur(s, 0);
    std::function<void(std::size_t, Count)> rec = [&](std::size_t k, Count left) {
        if (k == s) {
            if (left != 0) return;
            for (std::size_t r = 0; r < L.generators().size(); ++r) {
                long long v = 0;
                for (std::size_t c = 0; c < s; ++c) v += L.generators()[r][c] * cur[c];
                if (v != b[r]) return;
            }
            if (F.members.size() >= cap)
                throw std::runtime_error("fiber_enumerate: cap exceeded");
            F.members.push_back(cur);
            return;
        }
        for (Count v = 0; v <= left; ++v) {
            cur[k] = v;
            rec(k + 1, left - v);
        }
        cur[k] = 0;
    };
    rec(0, n);
    return F;
}

/// Moves translated to support positions; returns false if a move touches a
/// masked cell (such a basis is invalid for L).
static std::vector<std::vector<std::pair<std::size_t, int>>> support_moves(
    const Subspace& L, const MarkovBasis& B) {
    std::vector<std::vector<std::pair<std::size_t, int>>> out;
    for (const Move& m : B.moves) {
        std::vector<std::pair<std::size_t, int>> sm;
        for (auto [off, c] : m.entries) sm.push_back({L.support_position(off), c});
        out.push_back(std::move(sm));
    }
    return out;
}

namespace {
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::string key_of(const std::vector<Count>& v) {
    std::string k(v.size() * sizeof(Count), '\0');
    std::memcpy(k.data(), v.data(), k.size());
    return k;
}

bool fiber_connected(const std::vector<std::vector<Count>>& members,
                     const std::vector<std::vector<std::pair<std::size_t, int>>>& moves) {
    if (members.size() <= 1) return true;
    std::unordered_map<std::string, int> index;
    index.reserve(members.size() * 2);
    for (std::size_t i = 0; i < members.size(); ++i)
        index.emplace(key_of(members[i]), static_cast<int>(i));
    Dsu dsu(members.size());
    std::vector<Count> nb;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (const auto& mv : moves) {
            for (int sign : {+1, -1}) {
                nb = members[i];
                bool ok = true;
                for (auto [pos, c] : mv) {
                    nb[pos] += sign * c;
                    if (nb[pos] < 0) { ok = false; break; }
                }
                if (!ok) continue;
                auto it = index.find(key_of(nb));
                if (it != index.end()) dsu.unite(static_cast<int>(i), it->second);
            }
        }
    }
    int root = dsu.find(0);
    for (std::size_t i = 1; i < members.size(); ++i)
        if (dsu.find(static_cast<int>(i)) != root) return false;
    return true;
}
}  // namespace

bool certify_connectivity(const Fiber& F, const Subspace& L, const MarkovBasis& B) {
    return fiber_connected(F.members, support_moves(L, B));
}

bool certify_all_fibers(const Subspace& L, Count max_total, const MarkovBasis& B) {
    const std::size_t s = L.support().size();
    auto moves = support_moves(L, B);

    // enumerate all tables with total <= max_total, grouped by sufficient statistic
    std::map<std::vector<long long>, std::vector<std::vector<Count>>> fibers;
    std::vector<Count> cur(s, 0);
    std::function<void(std::size_t, Count)> rec = [&](std::size_t k, Count left) {
        if (k == s) {
            std::vector<long long> b;
            b.reserve(L.generators().size());
            for (const auto& g : L.generators()) {
                long long v = 0;
                for (std::size_t c = 0; c < s; ++c) v += g[c] * cur[c];
                b.push_back(v);
            }
            fibers[std::move(b)].push_back(cur);
            return;
        }
        for (Count v = 0; v <= left; ++v) {
            cur[k] = v;
            rec(k + 1, left - v);
        }
        cur[k] = 0;
    };
    rec(0, max_total);

    std::vector<const std::vector<std::vector<Count>>*> groups;
    for (const auto& [b, members] : fibers)
        if (members.size() > 1) groups.push_back(&members);

    bool ok = true;
#ifdef HSM_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) reduction(&& : ok)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(groups.size()); ++i)
        ok = ok && fiber_connected(*groups[static_cast<std::size_t>(i)], moves);
    return ok;
}

// ---------------------------------------------------------------------------
// base-case bases

static std::vector<Move> grid_swaps(int I, int J, const std::vector<char>& mask) {
    Shape g({I, J});
    std::vector<Move> out;
    for (int r = 1; r <= I; ++r)
        for (int r2 = r + 1; r2 <= I; ++r2)
            for (int c = 1; c <= J; ++c)
                for (int c2 = c + 1; c2 <= J; ++c2) {
                    std::size_t a = g.offset({r, c}), b = g.offset({r2, c2});
                    std::size_t x = g.offset({r, c2}), y = g.offset({r2, c});
                    if (mask[a] || mask[b] || mask[x] || mask[y]) continue;
                    out.push_back(Move{{{a, 1}, {b, 1}, {x, -1}, {y, -1}}}.canonical());
                }
    return out;
}

/// Cyclic moves of degree d: +(r_t, c_t), -(r_t, c_{t+1}) around distinct
/// row and column sequences, all cells unmasked.
static std::vector<Move> grid_loops(int I, int J, const std::vector<char>& mask, int d) {
    Shape g({I, J});
    std::vector<Move> out;
    std::vector<int> rows(d), cols(d);
    std::vector<char> rused(I + 1, 0), cused(J + 1, 0);
    std::function<void(int)> pick_cols = [&](int k) {
        if (k == d) {
            Move m;
            bool ok = true;
            for (int t = 0; t < d && ok; ++t) {
                std::size_t pos = g.offset({rows[t], cols[t]});
                std::size_t neg = g.offset({rows[t], cols[(t + 1) % d]});
                if (mask[pos] || mask[neg]) { ok = false; break; }
                m.entries.push_back({pos, 1});
                m.entries.push_back({neg, -1});
            }
            if (ok) out.push_back(m.canonical());
            return;
        }
        for (int c = 1; c <= J; ++c) {
            if (cused[c]) continue;
            cused[c] = 1;
            cols[k] = c;
            pick_cols(k + 1);
            cused[c] = 0;
        }
    };
    std::function<void(int)> pick_rows = [&](int k) {
        if (k == d) {
            pick_cols(0);
            return;
        }
        for (int r = (k == 0 ? 1 : 1); r <= I; ++r) {
            if (rused[r]) continue;
            if (k > 0 && r < rows[0]) continue;  // canonicalize: smallest row first
            rused[r] = 1;
            rows[k] = r;
            pick_rows(k + 1);
            rused[r] = 0;
        }
    };
    pick_rows(0);
    dedupe(out);
    return out;
}

MarkovBasis quasi_independence_basis(int I, int J, const std::vector<Cell>& zeros,
                                     Count certify_cap) {
    Shape g({I, J});
    std::vector<char> mask(g.cell_count(), 0);
    for (const Cell& z : zeros) mask[g.offset(z)] = 1;
    MarkovBasis B;
    B.moves = grid_swaps(I, J, mask);
    Subspace model = Subspace::main_effects(g, mask);
    B.fingerprint = configuration_fingerprint(model);
    if (zeros.empty()) {
        dedupe(B.moves);
        return B;  // classical independence basis, no oracle needed
    }
    for (int d = 2; d <= std::max(I, J); ++d) {
        if (d > 2) {
            auto loops = grid_loops(I, J, mask, d);
            B.moves.insert(B.moves.end(), loops.begin(), loops.end());
            dedupe(B.moves);
        }
        if (certify_all_fibers(model, certify_cap, B)) return B;
    }
    throw std::runtime_error("quasi_independence_basis: basis incomplete after degree cap");
}

MarkovBasis basic_basis_two_cliques(const Shape& full, const std::vector<char>& full_mask,
                                    VertexSet V1, VertexSet V2, Count certify_cap) {
    VertexSet V = V1 | V2;
    VertexSet S = V1 & V2;
    VertexSet A1 = V1.minus(S), A2 = V2.minus(S);
    MarkovBasis B;
    if (A1.empty() || A2.empty()) return B;

    std::vector<char> mmask = full_mask.empty()
                                  ? std::vector<char>(marginal_shape(full, V).cell_count(), 0)
                                  : marginal_mask(full, full_mask, V);
    Shape s1 = marginal_shape(full, A1);
    Shape s2 = marginal_shape(full, A2);
    Shape ss = S.empty() ? Shape(std::vector<int>{}) : marginal_shape(full, S);
    const int I = static_cast<int>(s1.cell_count());
    const int J = static_cast<int>(s2.cell_count());

    for (std::size_t so = 0; so < ss.cell_count(); ++so) {
        Cell cs = ss.cell_at(so);
        // grid offset (r,c) -> V-marginal offset
        Shape grid({I, J});
        std::vector<std::size_t> cell_of(grid.cell_count());
        std::vector<char> gmask(grid.cell_count(), 0);
        std::vector<Cell> gzeros;
        for (int r = 1; r <= I; ++r) {
            Cell c1 = s1.cell_at(static_cast<std::size_t>(r - 1));
            for (int c = 1; c <= J; ++c) {
                Cell c2 = s2.cell_at(static_cast<std::size_t>(c - 1));
                std::size_t voff = compose_offset(full, V, A1, c1, S, cs, A2, c2);
                std::size_t go = grid.offset({r, c});
                cell_of[go] = voff;
                if (mmask[voff]) {
                    gmask[go] = 1;
                    gzeros.push_back({r, c});
                }
            }
        }
        std::vector<Move> slice_moves;
        if (gzeros.empty()) {
            slice_moves = grid_swaps(I, J, gmask);
        } else {
            slice_moves = quasi_independence_basis(I, J, gzeros, certify_cap).moves;
        }
        for (Move m : slice_moves) {
            for (auto& [off, c] : m.entries) off = cell_of[off];
            B.moves.push_back(m.canonical());
        }
    }
    dedupe(B.moves);
    return B;
}

std::vector<Move> ext(const std::vector<Move>& B1, const Shape& full,
                      const std::vector<char>& full_mask, VertexSet V1, VertexSet S,
                      VertexSet V) {
    if (!S.subset_of(V1) || !V1.subset_of(V))
        throw std::invalid_argument("ext: require S c V1 c V");
    VertexSet A1 = V1.minus(S);
    VertexSet A2 = V.minus(V1);
    Shape sV1 = marginal_shape(full, V1);
    Shape sA2 = A2.empty() ? Shape(std::vector<int>{}) : marginal_shape(full, A2);
    std::vector<char> mmask = full_mask.empty()
                                  ? std::vector<char>()
                                  : marginal_mask(full, full_mask, V);
    const std::size_t K = sA2.cell_count();

    std::vector<Move> out;
    for (const Move& mv : B1) {
        // expand entries into unit positive/negative cells with (A1, S) parts
        struct Part {
            std::size_t soff;
            Cell a1, s;
        };
        std::vector<Part> pos, neg;
        for (auto [off, c] : mv.entries) {
            Cell cv1 = sV1.cell_at(off);
            // split cv1 (ordered by V1 members) into A1 and S coordinates
            Cell ca1, cs;
            std::size_t p = 0;
            for (int f : V1.members()) {
                if (S.contains(f))
                    cs.push_back(cv1[p]);
                else
                    ca1.push_back(cv1[p]);
                ++p;
            }
            std::size_t soff = 0;
            {
                std::size_t q = 0;
                for (int f : S.members())
                    soff = soff * static_cast<std::size_t>(full.level(f)) +
                           static_cast<std::size_t>(cs[q++] - 1);
            }
            for (int rep = 0; rep < std::abs(c); ++rep)
                (c > 0 ? pos : neg).push_back({soff, ca1, cs});
        }
        auto by_s = [](const Part& a, const Part& b) {
            if (a.soff != b.soff) return a.soff < b.soff;
            return a.a1 < b.a1;
        };
        std::sort(pos.begin(), pos.end(), by_s);
        std::sort(neg.begin(), neg.end(), by_s);
        if (pos.size() != neg.size())
            throw std::invalid_argument("ext: move does not balance");
        for (std::size_t r = 0; r < pos.size(); ++r)
            if (pos[r].soff != neg[r].soff)
                throw std::invalid_argument("ext: move is not in matched-S form");

        const std::size_t d = pos.size();
        // iterate k in I_{A2}^d
        std::vector<std::size_t> k(d, 0);
        while (true) {
            Move lifted;
            bool masked_hit = false;
            for (std::size_t r = 0; r < d && !masked_hit; ++r) {
                Cell c2 = sA2.cell_at(k[r]);
                std::size_t po =
                    compose_offset(full, V, A1, pos[r].a1, S, pos[r].s, A2, c2);
                std::size_t no =
                    compose_offset(full, V, A1, neg[r].a1, S, neg[r].s, A2, c2);
                if (!mmask.empty() && (mmask[po] || mmask[no])) { masked_hit = true; break; }
                lifted.entries.push_back({po, 1});
                lifted.entries.push_back({no, -1});
            }
            if (!masked_hit) {
                Move cm = lifted.canonical();
                if (!cm.entries.empty()) out.push_back(std::move(cm));
            }
            // next k
            std::size_t r = 0;
            while (r < d && ++k[r] == K) k[r++] = 0;
            if (r == d) break;
            if (d == 0) break;
        }
        if (d == 0) continue;
    }
    dedupe(out);
    return out;
}

// ---------------------------------------------------------------------------
// assembly

MarkovBasis assemble_hsm_basis(const Subspace& L,
                               const std::map<VertexSet, MarkovBasis>& component_bases,
                               Count certify_cap) {
    ModelDecomposition d = decompose(L);
    const Shape& full = L.shape();
    const std::vector<char>& mask = L.mask();

    auto comp_basis = [&](std::size_t k) -> MarkovBasis {
        auto it = component_bases.find(d.components[k]);
        if (it != component_bases.end()) return it->second;
        return markov_basis(d.component_models[k], certify_cap);
    };

    MarkovBasis first = comp_basis(0);
    VertexSet U = d.components[0];
    std::vector<Move> BU = first.moves;
    bool certified = first.certified;

    for (std::size_t k = 1; k < d.components.size(); ++k) {
        VertexSet C = d.components[k];
        VertexSet S = d.dividers[k - 1];
        VertexSet V = U | C;
        MarkovBasis bc = comp_basis(k);
        certified = certified && bc.certified;
        std::vector<Move> merged = ext(BU, full, mask, U, S, V);
        std::vector<Move> lifted_c = ext(bc.moves, full, mask, C, S, V);
        merged.insert(merged.end(), lifted_c.begin(), lifted_c.end());
        MarkovBasis two = basic_basis_two_cliques(full, mask, U, C, certify_cap);
        merged.insert(merged.end(), two.moves.begin(), two.moves.end());
        dedupe(merged);
        BU = std::move(merged);
        U = V;
    }

    MarkovBasis B;
    B.moves = std::move(BU);
    B.certified = certified;
    B.fingerprint = configuration_fingerprint(L);
    validate_basis(B, L);
    return B;
}

/// Embeds a move on the slice table (factors [m] \ Bset at level j_B) into
/// the full table.
static Move embed_slice_move(const Move& m, const Shape& full, VertexSet Bset,
                             const Cell& j_B) {
    VertexSet rest = VertexSet::full(full.num_factors()).minus(Bset);
    Shape ss = marginal_shape(full, rest);
    std::vector<int> bmembers = Bset.members();
    Move out;
    for (auto [off, c] : m.entries) {
        Cell sc = ss.cell_at(off);
        Cell fc(static_cast<std::size_t>(full.num_factors()));
        std::size_t rp = 0;
        for (int f = 1; f <= full.num_factors(); ++f) {
            if (Bset.contains(f)) {
                std::size_t bp = 0;
                while (bmembers[bp] != f) ++bp;
                fc[static_cast<std::size_t>(f) - 1] = j_B[bp];
            } else {
                fc[static_cast<std::size_t>(f) - 1] = sc[rp++];
            }
        }
        out.entries.push_back({full.offset(fc), c});
    }
    return out.canonical();
}

MarkovBasis markov_basis(const Subspace& L, Count certify_cap) {
    MarkovBasis B;
    B.fingerprint = configuration_fingerprint(L);
    if (static_cast<std::size_t>(L.dim()) == L.support().size()) return B;  // saturated

    ModelDecomposition d = decompose(L);
    if (d.components.size() > 1) return assemble_hsm_basis(L, {}, certify_cap);

    // prime model on the full factor set
    if (auto delta = L.hierarchical_structure()) {
        if (L.num_factors() == 2 && delta->facets().size() == 2 &&
            delta->facets()[0].count() == 1 && delta->facets()[1].count() == 1) {
            std::vector<Cell> zeros;
            for (std::size_t off = 0; off < L.mask().size(); ++off)
                if (L.mask()[off]) zeros.push_back(L.shape().cell_at(off));
            MarkovBasis qi = quasi_independence_basis(L.shape().level(1), L.shape().level(2),
                                                      zeros, certify_cap);
            B.moves = std::move(qi.moves);
            validate_basis(B, L);
            return B;
        }
    }

    // split-model route: union of slice bases when the model decomposes
    // across the slices of some factor
    for (int z = 1; z <= L.num_factors(); ++z) {
        VertexSet Z = VertexSet::of({z});
        if (!L.slice_decomposes(Z)) continue;
        bool certified = true;
        std::vector<Move> moves;
        for (int j = 1; j <= L.shape().level(z); ++j) {
            Subspace Ls = L.project_slice(Z, {j});
            MarkovBasis bs = markov_basis(Ls, certify_cap);
            certified = certified && bs.certified;
            for (const Move& m : bs.moves)
                moves.push_back(embed_slice_move(m, L.shape(), Z, {j}));
        }
        dedupe(moves);
        B.moves = std::move(moves);
        B.certified = certified;
        validate_basis(B, L);
        return B;
    }

    return lattice_basis(L);
}

MarkovBasis restrict_to_slice(const MarkovBasis& B, const Shape& shape, VertexSet Bset,
                              const Cell& j_B) {
    MarkovBasis out;
    out.fingerprint = B.fingerprint;
    out.certified = B.certified;
    std::vector<int> bmembers = Bset.members();
    for (const Move& m : B.moves) {
        bool keep = true;
        for (auto [off, c] : m.entries) {
            (void)c;
            Cell cell = shape.cell_at(off);
            for (std::size_t p = 0; p < bmembers.size(); ++p)
                if (cell[static_cast<std::size_t>(bmembers[p]) - 1] != j_B[p]) {
                    keep = false;
                    break;
                }
            if (!keep) break;
        }
        if (keep) out.moves.push_back(m);
    }
    return out;
}

MarkovBasis basis_union(const std::vector<MarkovBasis>& bases) {
    MarkovBasis out;
    for (const MarkovBasis& b : bases) {
        out.moves.insert(out.moves.end(), b.moves.begin(), b.moves.end());
        out.certified = out.certified && b.certified;
        if (out.fingerprint == 0) out.fingerprint = b.fingerprint;
    }
    dedupe(out.moves);
    return out;
}

MarkovBasis lattice_basis(const Subspace& L) {
    RatMat A(0, L.support().size());
    A.set_cols(L.support().size());
    for (const auto& g : L.generators()) {
        RatVec row(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) row[i] = g[i];
        A.push_row(std::move(row));
    }
    RatMat K = kernel(A);
    MarkovBasis B;
    B.certified = false;
    B.fingerprint = configuration_fingerprint(L);
    for (std::size_t i = 0; i < K.rows(); ++i) {
        std::vector<BigInt> prim = primitive_integer_row(K.row(i));
        Move m;
        for (std::size_t c = 0; c < prim.size(); ++c) {
            if (prim[c] == 0) continue;
            if (prim[c] > std::numeric_limits<int>::max() ||
                prim[c] < std::numeric_limits<int>::min())
                throw std::overflow_error("lattice_basis: entry exceeds int range");
            m.entries.push_back({L.support()[c], static_cast<int>(prim[c])});
        }
        B.moves.push_back(m.canonical());
    }
    dedupe(B.moves);
    validate_basis(B, L);
    return B;
}

void export_basis(const MarkovBasis& B, const Subspace& L, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_basis: cannot open " + path);
    const std::size_t C = L.support().size();
    out << B.moves.size() << " " << C << "\n";
    for (const Move& m : B.moves) {
        std::vector<int> row(C, 0);
        for (auto [off, c] : m.entries) row[L.support_position(off)] = c;
        for (std::size_t i = 0; i < C; ++i) out << row[i] << (i + 1 < C ? ' ' : '\n');
    }
}

MarkovBasis import_basis(const std::string& path, const Subspace& L) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("import_basis: cannot open " + path);
    std::size_t R, C;
    if (!(in >> R >> C)) throw std::runtime_error("import_basis: bad header");
    if (C != L.support().size())
        throw std::runtime_error("import_basis: column count does not match support size");
    MarkovBasis B;
    B.fingerprint = configuration_fingerprint(L);
    for (std::size_t r = 0; r < R; ++r) {
        Move m;
        for (std::size_t c = 0; c < C; ++c) {
            long long v;
            if (!(in >> v)) throw std::runtime_error("import_basis: truncated at row " +
                                                     std::to_string(r + 1));
            if (v != 0) m.entries.push_back({L.support()[c], static_cast<int>(v)});
        }
        m = m.canonical();
        if (!m.entries.empty()) B.moves.push_back(std::move(m));
    }
    dedupe(B.moves);
    try {
        validate_basis(B, L);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("import_basis: ") + e.what());
    }
    return B;
}

}  // namespace hsm
