#ifndef HSM_MARKOV_HPP
#define HSM_MARKOV_HPP

#include "hsm/subspace.hpp"
#include "hsm/table.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hsm {

/// Sparse integer move over table offsets (offsets of whichever table the
/// containing basis refers to).  Entries sorted by offset, coefficients
/// nonzero.  Sign-canonicalized: the first entry is positive.
struct Move {
    std::vector<std::pair<std::size_t, int>> entries;

    int degree() const;       // sum of positive coefficients
    Move canonical() const;   // sorted, combined, sign-normalized
    bool operator==(const Move& o) const { return entries == o.entries; }
    bool operator<(const Move& o) const { return entries < o.entries; }
};

struct MarkovBasis {
    std::vector<Move> moves;
    std::uint64_t fingerprint = 0;  // configuration hash of the target model
    bool certified = true;          // false only for the lattice fallback
};

/// FNV hash of shape, mask and generator rows; keys the basis cache.
std::uint64_t configuration_fingerprint(const Subspace& L);

/// Checks every move: support avoids masked cells and A z = 0 for every
/// generator of L.  Throws with the offending move index otherwise.
void validate_basis(const MarkovBasis& B, const Subspace& L);

/// Markov basis of the two-way (quasi-)independence model on an I x J grid
/// with the given structural zeros.  Degree-2 swaps plus cyclic moves of
/// degree >= 3 around the zeros, oracle-certified over all fibers with
/// total <= certify_cap when zeros are present.
MarkovBasis quasi_independence_basis(int I, int J, const std::vector<Cell>& zeros,
                                     Count certify_cap = 6);

/// B_{V1,V2}: basis of the hierarchical model with the two cliques V1, V2
/// on the marginal table of V = V1 u V2 (moves over marginal offsets of V,
/// factors ascending).  With masked cells, each S-slice is treated as a
/// two-way quasi-independence grid.
MarkovBasis basic_basis_two_cliques(const Shape& full, const std::vector<char>& full_mask,
                                    VertexSet V1, VertexSet V2, Count certify_cap = 6);

/// Ext(B(V1) -> V): lifts each move of B1 (over the V1-marginal table) by
/// attaching every combination of A2 = V \ V1 coordinates to the matched
/// positive/negative pairs.  Lifts touching masked cells of the V-marginal
/// table are dropped.  Throws if a move is not in matched-S form.
std::vector<Move> ext(const std::vector<Move>& B1, const Shape& full,
                      const std::vector<char>& full_mask, VertexSet V1, VertexSet S,
                      VertexSet V);

/// Recursive union along the perfect sequence of decompose(L):
/// B := Ext(B(U) -> V) u Ext(B(C) -> V) u B_{U,C} at every step.
/// Component bases are taken from the map when present and built with
/// markov_basis otherwise; throws listing components that need external
/// input when a component basis is neither supplied nor constructible.
MarkovBasis assemble_hsm_basis(const Subspace& L,
                               const std::map<VertexSet, MarkovBasis>& component_bases = {},
                               Count certify_cap = 6);

/// Omnibus builder: saturated -> empty; decomposable structure -> recursive
/// assembly; two-way quasi-independence -> certified base case; slice
/// decomposition -> union of embedded slice bases; otherwise a lattice
/// kernel basis flagged certified = false.
MarkovBasis markov_basis(const Subspace& L, Count certify_cap = 6);

/// Keeps only moves supported entirely on the j_B slice of the table.
MarkovBasis restrict_to_slice(const MarkovBasis& B, const Shape& shape, VertexSet Bset,
                              const Cell& j_B);

/// Concatenation with canonical deduplication.
MarkovBasis basis_union(const std::vector<MarkovBasis>& bases);

/// All nonnegative integer tables on the support of L sharing A x with t.
/// Throws when the enumeration exceeds cap members.
struct Fiber {
    std::vector<std::vector<Count>> members;  // counts in support order
};
Fiber fiber_enumerate(const Subspace& L, const Table& t, std::size_t cap = 2000000);

/// Move-graph connectivity of a fiber (moves over full offsets of L's shape).
bool certify_connectivity(const Fiber& F, const Subspace& L, const MarkovBasis& B);

/// Exhaustive check: every fiber of every table with total <= max_total on
/// the support of L is connected by B.
bool certify_all_fibers(const Subspace& L, Count max_total, const MarkovBasis& B);

/// Text format: "R C" then R rows of C integers over the support of L in
/// support order.  Import validates every row against the configuration.
void export_basis(const MarkovBasis& B, const Subspace& L, const std::string& path);
MarkovBasis import_basis(const std::string& path, const Subspace& L);

/// Integer kernel basis of the configuration; not certified as a Markov
/// basis.
MarkovBasis lattice_basis(const Subspace& L);

}  // namespace hsm

#endif
