#include "hsm/hypergraph.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hsm {

std::string VertexSet::str() const {
    std::string s = "{";
    bool first = true;
    for (int v : members()) {
        if (!first) s += ",";
        s += std::to_string(v);
        first = false;
    }
    return s + "}";
}

static std::vector<VertexSet> reduce_maximal(std::vector<VertexSet> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<VertexSet> out;
    for (VertexSet e : edges) {
        if (e.empty()) continue;
        bool dominated = false;
        for (VertexSet f : edges)
            if (f != e && e.subset_of(f)) { dominated = true; break; }
        if (!dominated) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Complex::Complex(int m, std::vector<VertexSet> edges) {
    if (m < 1 || m > 16) throw std::invalid_argument("Complex: m must be in [1,16]");
    m_ = m;
    VertexSet covered;
    for (VertexSet e : edges) {
        if (!e.subset_of(VertexSet::full(m)))
            throw std::out_of_range("Complex: facet outside [m]");
        covered = covered | e;
    }
    for (int v = 1; v <= m; ++v)
        if (!covered.contains(v)) edges.push_back(VertexSet::of({v}));
    facets_ = reduce_maximal(std::move(edges));
}

Complex::Complex(int m, const std::vector<std::vector<int>>& edges) {
    std::vector<VertexSet> es;
    es.reserve(edges.size());
    for (const auto& e : edges) es.push_back(VertexSet::of(e));
    *this = Complex(m, std::move(es));
}

Complex Complex::raw(int m, std::vector<VertexSet> edges) {
    Complex c;
    c.m_ = m;
    c.facets_ = reduce_maximal(std::move(edges));
    return c;
}

VertexSet Complex::vertices() const {
    VertexSet u;
    for (VertexSet f : facets_) u = u | f;
    return u;
}

Complex induced(const Complex& H, VertexSet W) {
    std::vector<VertexSet> edges;
    for (VertexSet f : H.facets()) {
        VertexSet g = f & W;
        if (!g.empty()) edges.push_back(g);
    }
    return Complex::raw(H.m(), std::move(edges));
}

std::vector<VertexSet> connected_vertex_components(const Complex& H) {
    std::vector<VertexSet> comps;
    VertexSet seen;
    VertexSet all = H.vertices();
    for (int v = 1; v <= H.m(); ++v) {
        if (!all.contains(v) || seen.contains(v)) continue;
        VertexSet comp = VertexSet::of({v});
        bool grew = true;
        while (grew) {
            grew = false;
            for (VertexSet f : H.facets()) {
                if (!(f & comp).empty() && !f.subset_of(comp)) {
                    comp = comp | f;
                    grew = true;
                }
            }
        }
        comps.push_back(comp);
        seen = seen | comp;
    }
    return comps;
}

bool is_partial_edge(const Complex& H, VertexSet S) {
    if (!S.subset_of(VertexSet::full(H.m())))
        throw std::out_of_range("is_partial_edge: vertices outside [m]");
    for (VertexSet f : H.facets())
        if (S.subset_of(f)) return true;
    return false;
}

bool is_separator(const Complex& H, VertexSet S) {
    if (!is_partial_edge(H, S))
        throw std::invalid_argument("is_separator: S is not a partial edge");
    VertexSet rest = H.vertices().minus(S);
    if (rest.empty()) return false;
    return connected_vertex_components(induced(H, rest)).size() > 1;
}

bool separates(const Complex& H, VertexSet S, int u, int v) {
    if (S.contains(u) || S.contains(v)) return false;
    Complex sub = induced(H, H.vertices().minus(S));
    for (VertexSet comp : connected_vertex_components(sub))
        if (comp.contains(u) != comp.contains(v)) return true;
    return false;
}

/// All partial edges of H (nonempty subsets of facets, deduplicated).
static std::vector<VertexSet> partial_edges(const Complex& H) {
    if (H.m() > 16) throw std::invalid_argument("partial_edges: m > 16 unsupported");
    std::set<VertexSet> out;
    for (VertexSet f : H.facets()) {
        std::uint32_t b = f.bits;
        for (std::uint32_t s = b; s; s = (s - 1) & b) out.insert(VertexSet(s));
    }
    return {out.begin(), out.end()};
}

std::vector<VertexSet> dividers(const Complex& H) {
    std::vector<VertexSet> out;
    VertexSet all = H.vertices();
    for (VertexSet S : partial_edges(H)) {
        VertexSet rest = all.minus(S);
        if (rest.count() < 2) continue;
        if (connected_vertex_components(induced(H, rest)).size() < 2) continue;
        bool witness = false;
        for (int u = 1; u <= H.m() && !witness; ++u) {
            if (!rest.contains(u)) continue;
            for (int v = u + 1; v <= H.m() && !witness; ++v) {
                if (!rest.contains(v)) continue;
                if (!separates(H, S, u, v)) continue;
                bool smaller = false;
                std::uint32_t b = S.bits;
                for (std::uint32_t s = (b - 1) & b; !smaller; s = (s - 1) & b) {
                    if (separates(H, VertexSet(s), u, v)) smaller = true;
                    if (s == 0) break;
                }
                if (!smaller) witness = true;
            }
        }
        if (witness) out.push_back(S);
    }
    return out;
}

/// Smallest (cardinality, then lexicographic) partial-edge separator, or an
/// empty set if H is compact.
static VertexSet minimal_separator(const Complex& H) {
    std::vector<VertexSet> cand = partial_edges(H);
    std::sort(cand.begin(), cand.end(), [](VertexSet a, VertexSet b) {
        if (a.count() != b.count()) return a.count() < b.count();
        return a.bits < b.bits;
    });
    VertexSet all = H.vertices();
    for (VertexSet S : cand) {
        VertexSet rest = all.minus(S);
        if (rest.count() < 2) continue;
        if (connected_vertex_components(induced(H, rest)).size() > 1) return S;
    }
    return VertexSet();
}

static void compact_components_rec(const Complex& H, std::vector<VertexSet>& out) {
    std::vector<VertexSet> parts = connected_vertex_components(H);
    if (parts.size() > 1) {
        for (VertexSet p : parts) compact_components_rec(induced(H, p), out);
        return;
    }
    VertexSet S = minimal_separator(H);
    if (S.empty()) {
        out.push_back(H.vertices());
        return;
    }
    for (VertexSet comp : connected_vertex_components(induced(H, H.vertices().minus(S))))
        compact_components_rec(induced(H, comp | S), out);
}

/// Orders a family of vertex sets (facets of an acyclic hypergraph) into a
/// perfect sequence: start at the lexicographically smallest set, then
/// repeatedly append a set whose intersection with the union so far is
/// contained in a single already-chosen set.
static Decomposition perfect_order(std::vector<VertexSet> comps) {
    std::sort(comps.begin(), comps.end(), [](VertexSet a, VertexSet b) {
        if (a.min_vertex() != b.min_vertex()) return a.min_vertex() < b.min_vertex();
        return a.bits < b.bits;
    });
    Decomposition d;
    std::vector<char> used(comps.size(), 0);
    VertexSet covered;
    for (std::size_t step = 0; step < comps.size(); ++step) {
        std::size_t pick = comps.size();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (used[i]) continue;
            if (step == 0) { pick = i; break; }
            VertexSet inter = comps[i] & covered;
            bool ok = false;
            for (std::size_t j = 0; j < comps.size() && !ok; ++j)
                if (used[j] && inter.subset_of(comps[j])) ok = true;
            if (ok) { pick = i; break; }
        }
        if (pick == comps.size())
            throw std::runtime_error("perfect_order: no running-intersection order (cyclic input)");
        used[pick] = 1;
        if (step > 0) d.dividers.push_back(comps[pick] & covered);
        covered = covered | comps[pick];
        d.components.push_back(comps[pick]);
    }
    return d;
}

Decomposition maximal_compact_components(const Complex& H) {
    std::vector<VertexSet> comps;
    compact_components_rec(H, comps);
    // drop non-maximal duplicates from overlapping recursions
    comps = reduce_maximal(std::move(comps));
    return perfect_order(std::move(comps));
}

bool is_acyclic(const Complex& H) {
    // Graham/GYO: repeatedly delete vertices in exactly one facet and facets
    // contained in other facets.
    std::vector<VertexSet> es = H.facets();
    bool changed = true;
    while (changed && es.size() > 1) {
        changed = false;
        for (int v = 1; v <= H.m(); ++v) {
            int cnt = 0;
            for (VertexSet e : es)
                if (e.contains(v)) ++cnt;
            if (cnt == 1) {
                for (VertexSet& e : es) e = e.minus(VertexSet::of({v}));
                changed = true;
            }
        }
        std::vector<VertexSet> next = reduce_maximal(es);
        if (next.size() != es.size()) changed = true;
        es = std::move(next);
    }
    return es.size() <= 1;
}

Decomposition junction_tree(const Complex& H) {
    if (!is_acyclic(H)) throw std::invalid_argument("junction_tree: complex is cyclic");
    return perfect_order(H.facets());
}

}  // namespace hsm
