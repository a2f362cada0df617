#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hsm/datasets.hpp"
#include "hsm/subspace.hpp"

#include <algorithm>

using namespace hsm;

using Facets = std::vector<std::vector<int>>;

// main effects + delta*phi_12 + delta'*psi_23 (separate coefficients):
// the three-way conditional-independence submodel with one-parameter
// interactions per margin
static Subspace separate_interaction_model(const Shape& s) {
    Subspace L = Subspace::main_effects(s);
    L.add_uniform_association(VertexSet::of({1, 2}));
    L.add_uniform_association(VertexSet::of({2, 3}));
    return L;
}

// main effects + delta*(phi_12 + psi_23): shared coefficient across margins
static Subspace common_interaction_model(const Shape& s) {
    Subspace L = Subspace::main_effects(s);
    std::vector<long long> phi;
    for (int i = 1; i <= s.level(1); ++i)
        for (int j = 1; j <= s.level(2); ++j)
            for (int k = 1; k <= s.level(3); ++k)
                phi.push_back(static_cast<long long>(i) * j + static_cast<long long>(j) * k);
    L.add_covariate(VertexSet::full(3), phi);
    return L;
}

// single-coefficient pairwise model on 2^5 whose closure is the six-edge graph
static Subspace five_way_model() {
    Shape s({2, 2, 2, 2, 2});
    Subspace L = Subspace::main_effects(s);
    std::vector<std::pair<int, int>> edges{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 5}, {4, 5}};
    std::vector<long long> phi;
    for (std::size_t off = 0; off < s.cell_count(); ++off) {
        Cell c = s.cell_at(off);
        long long v = 0, w = 1;
        for (auto [a, b] : edges) {
            v += w * (2 * c[a - 1] - 3) * (2 * c[b - 1] - 3);
            ++w;
        }
        phi.push_back(v);
    }
    L.add_covariate(VertexSet::full(5), phi);
    return L;
}

TEST_CASE("dimensions of basic models") {
    Shape s({3, 3, 3});
    CHECK(Subspace(s).dim() == 1);
    CHECK(Subspace::main_effects(s).dim() == 7);
    CHECK(Subspace::hierarchical(s, Complex(3, Facets{{1, 2}, {2, 3}})).dim() == 15);
    Subspace sat = Subspace::hierarchical(s, Complex(3, Facets{{1, 2, 3}}));
    CHECK(sat.dim() == 27);
    CHECK(sat.is_saturated(VertexSet::full(3)));
}

TEST_CASE("saturation is monotone under subsets") {
    Shape s({3, 2, 2});
    Subspace L = Subspace::hierarchical(s, Complex(3, Facets{{1, 2}, {2, 3}}));
    CHECK(L.is_saturated(VertexSet::of({1, 2})));
    CHECK(L.is_saturated(VertexSet::of({1})));
    CHECK(L.is_saturated(VertexSet::of({2})));
    CHECK(!L.is_saturated(VertexSet::of({1, 3})));
    CHECK(!L.is_saturated(VertexSet::full(3)));
}

TEST_CASE("conformality to the two marginal spaces") {
    Shape s({3, 3, 3});
    std::vector<VertexSet> parts{VertexSet::of({1, 2}), VertexSet::of({2, 3})};
    CHECK(separate_interaction_model(s).is_conformal(parts));
    CHECK(!common_interaction_model(s).is_conformal(parts));
}

TEST_CASE("separate-coefficient model decomposes, shared-coefficient is prime") {
    Shape s({3, 3, 3});
    Subspace L2 = separate_interaction_model(s);
    ModelDecomposition d = decompose(L2);
    REQUIRE(d.components.size() == 2);
    std::vector<VertexSet> comps = d.components;
    std::sort(comps.begin(), comps.end());
    CHECK(comps == std::vector<VertexSet>{VertexSet::of({1, 2}), VertexSet::of({2, 3})});
    CHECK(d.dividers == std::vector<VertexSet>{VertexSet::of({2})});

    Subspace L6 = common_interaction_model(s);
    CHECK(decompose(L6).components.size() == 1);
    auto [ambient, order] = ambient_decomposable(L6);
    CHECK(ambient.facets() == std::vector<VertexSet>{VertexSet::full(3)});
}

TEST_CASE("five-way closure, tightness and HSM checks") {
    Subspace L = five_way_model();
    CHECK(L.dim() == 7);
    Complex closure = L.hierarchical_closure();
    std::vector<VertexSet> want;
    for (auto e : Facets{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 5}, {4, 5}})
        want.push_back(VertexSet::of(e));
    std::vector<VertexSet> got = closure.facets();
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
    CHECK(!L.is_tight_hsm());
    CHECK(!L.is_hsm_of(closure));
    Complex d1(5, Facets{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 5}, {4, 5}, {1, 4}});
    Complex d2(5, Facets{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 5}, {4, 5}, {1, 5}});
    CHECK(L.is_hsm_of(d1));
    CHECK(L.is_hsm_of(d2));
}

TEST_CASE("hierarchical models are tight") {
    Shape s({3, 2, 2});
    Subspace L = Subspace::hierarchical(s, Complex(3, Facets{{1, 2}, {2, 3}}));
    CHECK(L.is_tight_hsm());
    auto h = L.hierarchical_structure();
    REQUIRE(h.has_value());
    std::vector<VertexSet> f = h->facets();
    std::sort(f.begin(), f.end());
    CHECK(f == std::vector<VertexSet>{VertexSet::of({1, 2}), VertexSet::of({2, 3})});
    CHECK(!common_interaction_model(Shape({3, 3, 3})).hierarchical_structure().has_value());
}

TEST_CASE("closure refuses structural zeros") {
    CHECK_THROWS(datasets::pewee_model1().hierarchical_closure());
}

TEST_CASE("pewee models decompose across the divider {2}") {
    for (Subspace L : {datasets::pewee_model1(), datasets::pewee_model2()}) {
        ModelDecomposition d = decompose(L);
        REQUIRE(d.components.size() == 2);
        std::vector<VertexSet> comps = d.components;
        std::sort(comps.begin(), comps.end());
        CHECK(comps == std::vector<VertexSet>{VertexSet::of({1, 2}), VertexSet::of({2, 3})});
        CHECK(d.dividers == std::vector<VertexSet>{VertexSet::of({2})});
    }
    CHECK(datasets::pewee_model1().dim() == 20);
    CHECK(datasets::pewee_model2().dim() == 10);
}

TEST_CASE("survey models") {
    Subspace m1 = datasets::wam_model1();
    Subspace m2 = datasets::wam_model2();
    CHECK(m1.dim() == 32);
    CHECK(m2.dim() == 30);
    CHECK(m1.contains(m2));
    CHECK(!m2.contains(m1));
    auto h = m1.hierarchical_structure();
    REQUIRE(h.has_value());
    CHECK(m2.is_hsm_of(*h));
    CHECK(m2.slice_decomposes(VertexSet::of({3})));
    ModelDecomposition d = decompose(m2);
    CHECK(d.components.size() == 3);
}

TEST_CASE("component models live on the marginal tables with saturated dividers") {
    Subspace L = datasets::pewee_model1();
    ModelDecomposition d = decompose(L);
    REQUIRE(d.component_models.size() == d.components.size());
    for (std::size_t k = 0; k < d.components.size(); ++k) {
        CHECK(d.component_models[k].num_factors() == d.components[k].count());
        CHECK(d.component_models[k].dim() >= 1);
    }
    for (VertexSet S : d.dividers) CHECK(L.is_saturated(S));
}

TEST_CASE("independence model splits into singletons") {
    Shape s({3, 4});
    Subspace L = Subspace::main_effects(s);
    ModelDecomposition d = decompose(L);
    REQUIRE(d.components.size() == 2);
    std::vector<VertexSet> comps = d.components;
    std::sort(comps.begin(), comps.end());
    CHECK(comps == std::vector<VertexSet>{VertexSet::of({1}), VertexSet::of({2})});
    REQUIRE(d.dividers.size() == 1);
    CHECK(d.dividers[0].empty());
}

TEST_CASE("split model validates the saturation condition") {
    Shape s({3, 2, 3});
    SplitSpec good{Complex(3, Facets{{1, 2, 3}}),
                   {{VertexSet::full(3), VertexSet::of({2})}},
                   {{{VertexSet::full(3), Cell{1}}, {VertexSet::of({1}), VertexSet::of({3})}},
                    {{VertexSet::full(3), Cell{2}}, {VertexSet::of({1, 3})}}}};
    Subspace L = split_model(s, good);
    CHECK(L.slice_decomposes(VertexSet::of({2})));
    CHECK(L.dim() == 14);
    CHECK(L.support().size() == 18);

    // slice complex missing coverage of a clique intersection -> rejected
    Shape s6({2, 2, 2, 2, 2, 2});
    SplitSpec bad{Complex(6, Facets{{1, 2, 3, 5}, {2, 3, 4, 5}, {3, 4, 5, 6}}),
                  {{VertexSet::of({2, 3, 4, 5}), VertexSet::of({3})}},
                  {{{VertexSet::of({2, 3, 4, 5}), Cell{1}}, {VertexSet::of({2})}},
                   {{VertexSet::of({2, 3, 4, 5}), Cell{2}}, {VertexSet::of({2, 4, 5})}}}};
    CHECK_THROWS(split_model(s6, bad));
}

TEST_CASE("contains and same_space are exact") {
    Shape s({3, 3});
    Subspace me = Subspace::main_effects(s);
    Subspace ua = Subspace::main_effects(s);
    ua.add_uniform_association(VertexSet::of({1, 2}));
    CHECK(ua.contains(me));
    CHECK(!me.contains(ua));
    Subspace me2 = Subspace::main_effects(s);
    CHECK(me.same_space(me2));
}
