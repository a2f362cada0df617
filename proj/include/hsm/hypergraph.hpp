#ifndef HSM_HYPERGRAPH_HPP
#define HSM_HYPERGRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsm {

/// Vertex subset of [m], m <= 16, as a bitmask over vertices 1..m.
struct VertexSet {
    std::uint32_t bits = 0;

    VertexSet() = default;
    explicit VertexSet(std::uint32_t b) : bits(b) {}
    static VertexSet of(const std::vector<int>& vs) {
        VertexSet s;
        for (int v : vs) s.add(v);
        return s;
    }
    static VertexSet full(int m) { return VertexSet((1u << m) - 1u); }

    void add(int v) {
        if (v < 1 || v > 16) throw std::out_of_range("VertexSet: vertex out of range");
        bits |= 1u << (v - 1);
    }
    bool contains(int v) const { return (bits >> (v - 1)) & 1u; }
    bool subset_of(VertexSet o) const { return (bits & ~o.bits) == 0; }
    bool empty() const { return bits == 0; }
    int count() const { return __builtin_popcount(bits); }
    int min_vertex() const { return __builtin_ctz(bits) + 1; }

    VertexSet operator|(VertexSet o) const { return VertexSet(bits | o.bits); }
    VertexSet operator&(VertexSet o) const { return VertexSet(bits & o.bits); }
    VertexSet minus(VertexSet o) const { return VertexSet(bits & ~o.bits); }
    bool operator==(VertexSet o) const { return bits == o.bits; }
    bool operator!=(VertexSet o) const { return bits != o.bits; }
    bool operator<(VertexSet o) const { return bits < o.bits; }

    std::vector<int> members() const {
        std::vector<int> vs;
        for (int v = 1; v <= 16; ++v)
            if (contains(v)) vs.push_back(v);
        return vs;
    }
    std::string str() const;
};

/// Simplicial complex on [m] given by its facets (incomparable sets).
/// Isolated vertices are represented by singleton facets.
class Complex {
public:
    Complex(int m, std::vector<VertexSet> edges);
    Complex(int m, const std::vector<std::vector<int>>& edges);

    /// Facets as given, reduced to maximal sets, without filling in isolated
    /// vertices of [m].  Used for induced subhypergraphs.
    static Complex raw(int m, std::vector<VertexSet> edges);

    int m() const { return m_; }
    const std::vector<VertexSet>& facets() const { return facets_; }

    /// Union of all facets.
    VertexSet vertices() const;

    bool operator==(const Complex& o) const { return m_ == o.m_ && facets_ == o.facets_; }

private:
    Complex() = default;

    int m_ = 0;
    std::vector<VertexSet> facets_;
};

/// Running-intersection-ordered components C_1..C_K with dividers S_2..S_K.
struct Decomposition {
    std::vector<VertexSet> components;
    std::vector<VertexSet> dividers;  // multiset; size = components.size() - 1
};

bool is_partial_edge(const Complex& H, VertexSet S);

/// Pre: S is a partial edge.  True iff removing S disconnects the
/// subhypergraph induced by the remaining vertices.
bool is_separator(const Complex& H, VertexSet S);

/// All partial-edge separators S such that some vertex pair is separated
/// by S and by no proper subset of S.
std::vector<VertexSet> dividers(const Complex& H);

/// True iff u and v lie in different connected components of H induced on
/// [m] \ S (and neither belongs to S).
bool separates(const Complex& H, VertexSet S, int u, int v);

/// Maximal compact components in running-intersection order with their
/// dividers.  Pre: H connected.
Decomposition maximal_compact_components(const Complex& H);

/// Graham/GYO reduction.
bool is_acyclic(const Complex& H);

/// Perfect sequence of facets with dividers S_k = (C_1..C_{k-1}) ∩ C_k.
/// Throws if H is cyclic.
Decomposition junction_tree(const Complex& H);

/// Facets intersected with W, reduced to maximal nonempty sets.
Complex induced(const Complex& H, VertexSet W);

/// Connected components of the vertex set of H (vertices sharing a facet
/// are connected).
std::vector<VertexSet> connected_vertex_components(const Complex& H);

}  // namespace hsm

#endif
