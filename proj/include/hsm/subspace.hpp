#ifndef HSM_SUBSPACE_HPP
#define HSM_SUBSPACE_HPP

#include "hsm/hypergraph.hpp"
#include "hsm/ratmat.hpp"
#include "hsm/table.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hsm {

enum class TermKind { Constant, MainEffect, Interaction, Covariate, CSI };

struct Term {
    TermKind kind = TermKind::Covariate;
    VertexSet D;     // interaction factors
    VertexSet B;     // CSI conditioning factors
    Cell level;      // j_B for CSI terms
    std::string name;
};

/// Integer basis of a log-affine model L restricted to the unmasked support,
/// with exact-arithmetic rank/membership machinery.  The constant function
/// is always contained.  Queries are const and thread-safe.
class Subspace {
public:
    /// The model containing only the constant function.
    Subspace(Shape shape, std::vector<char> mask = {});

    /// L_Delta: marginal-cell indicators for every facet of the complex.
    static Subspace hierarchical(const Shape& shape, const Complex& delta,
                                 std::vector<char> mask = {});

    /// Constant plus one main-effect family per factor.
    static Subspace main_effects(const Shape& shape, std::vector<char> mask = {});

    // -- builders (used during construction; queries afterwards) --

    /// All D-marginal-cell indicators.
    void add_interaction(VertexSet D);
    /// One generator psi(i) = phi(i_D); phi given row-major over I_D.
    void add_covariate(VertexSet D, const std::vector<long long>& phi,
                       std::string name = "covariate");
    /// Indicators f(i_{D\B}) 1{i_B = j_B} for every level of i_{D\B}.
    void add_csi(VertexSet D, VertexSet B, const Cell& j_B);
    /// phi(i,j) = i*j on a two-factor D.
    void add_uniform_association(VertexSet D);
    /// phi(i,j) = 1{i <= cut_i and j <= cut_j} on a two-factor D.
    void add_change_point(VertexSet D, int cut_i, int cut_j);
    /// Per-level diagonal indicators 1{i=j=l} on a square two-factor D.
    void add_diagonal(VertexSet D);

    // -- accessors --

    const Shape& shape() const { return shape_; }
    int num_factors() const { return shape_.num_factors(); }
    const std::vector<char>& mask() const { return mask_; }
    bool masked() const;
    const std::vector<std::size_t>& support() const { return support_; }
    int dim() const { return static_cast<int>(space_.dim()); }
    const RowSpace& row_space() const { return space_; }
    const std::vector<std::vector<long long>>& generators() const { return int_gens_; }
    const std::vector<Term>& terms() const { return terms_; }

    /// Integer configuration matrix A (rows = independent generators over the
    /// support, in support order).  rank(A) = dim(L).
    const std::vector<std::vector<long long>>& configuration() const { return int_gens_; }

    // -- exact queries --

    /// True iff every D-marginal-cell indicator (on support) lies in L.
    bool is_saturated(VertexSet D) const;

    /// Basis of L ∩ L_D as rows over the support.
    RatMat intersect_marginal(VertexSet D) const;

    /// Basis of L ∩ L^{j_B} (functions vanishing off the j_B-slice).
    RatMat intersect_slice(VertexSet B, const Cell& j_B) const;

    /// L = sum of L ∩ L_part over parts?
    bool is_conformal(const std::vector<VertexSet>& parts) const;

    /// Finest partition {A_k} of [m] with L conformal to {L_{A_k}} and the
    /// support a product across the parts.
    std::vector<VertexSet> connected_components() const;

    bool is_connected() const { return connected_components().size() == 1; }

    /// The component model L ∩ L_C as a standalone subspace over I_C
    /// (factors of C in increasing order, marginal mask).
    Subspace project(VertexSet C) const;

    /// The restriction of L ∩ L^{j_B} to the j_B-slice, as a subspace over
    /// the slice table on factors [m] \ B.
    Subspace project_slice(VertexSet B, const Cell& j_B) const;

    /// If L equals the hierarchical model of its maximal saturated subsets,
    /// returns that complex (the facets generate L by marginal indicators).
    std::optional<Complex> hierarchical_structure() const;

    /// True iff L = ⊕_{j_Z} (L ∩ L^{j_Z}); the split-model slice structure.
    bool slice_decomposes(VertexSet Z) const;

    /// Smallest hierarchical model containing L (unmasked support only).
    Complex hierarchical_closure() const;

    bool is_hsm_of(const Complex& delta) const;
    bool is_tight_hsm() const;

    bool contains(const Subspace& other) const;
    bool same_space(const Subspace& other) const;

    std::size_t support_position(std::size_t full_offset) const;

private:
    friend struct DecomposeSearch;

    bool add_generator(std::vector<long long> gen, Term term);
    std::vector<long long> marginal_indicator(VertexSet D, std::size_t marginal_offset) const;
    std::vector<std::vector<std::size_t>> support_classes(VertexSet D) const;

    Shape shape_;
    std::vector<char> mask_;
    std::vector<std::size_t> support_;       // ascending full offsets
    std::vector<std::size_t> support_pos_;   // full offset -> index in support_, or npos
    RowSpace space_;
    std::vector<std::vector<long long>> int_gens_;
    std::vector<Term> terms_;
};

/// Maximal extended compact components of L with dividers and localized
/// component models, in running-intersection order.
struct ModelDecomposition {
    std::vector<VertexSet> components;
    std::vector<VertexSet> dividers;          // multiset, size K-1
    std::vector<Subspace> component_models;   // project(C_k)
};

/// Recursive partial-edge-separator decomposition (exhaustive search).
/// Pre: L connected.
ModelDecomposition decompose(const Subspace& L);

/// The smallest decomposable model containing L as an HSM: the complex of
/// maximal extended compact components (always acyclic) with its perfect
/// sequence.
std::pair<Complex, Decomposition> ambient_decomposable(const Subspace& L);

bool is_conformal(const Subspace& L, const std::vector<VertexSet>& parts);

/// Split subspace model input: root cliques of a decomposable complex, the
/// split factors Z(C), and per-slice complexes on C \ Z(C).
struct SplitSpec {
    Complex root;
    std::map<VertexSet, VertexSet> Z;                             // clique -> Z(C)
    std::map<std::pair<VertexSet, Cell>, std::vector<VertexSet>> slice_complexes;
};

/// Builds the split model; validates the saturation condition on clique
/// intersections and throws with the offending pair (C, C') if violated.
Subspace split_model(const Shape& shape, const SplitSpec& spec,
                     std::vector<char> mask = {});

}  // namespace hsm

#endif
