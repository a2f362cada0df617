#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hsm/datasets.hpp"
#include "hsm/markov.hpp"

#include <cstdio>
#include <filesystem>

using namespace hsm;

using Facets = std::vector<std::vector<int>>;

TEST_CASE("move canonicalization") {
    Move m{{{3, -1}, {1, 1}, {2, -1}, {4, 1}}};
    Move c = m.canonical();
    CHECK(c.entries == std::vector<std::pair<std::size_t, int>>{{1, 1}, {2, -1}, {3, -1}, {4, 1}});
    CHECK(c.degree() == 2);
    Move flip{{{1, -1}, {2, 1}}};
    CHECK(flip.canonical().entries ==
          std::vector<std::pair<std::size_t, int>>{{1, 1}, {2, -1}});
}

TEST_CASE("two-way independence basis sizes") {
    CHECK(quasi_independence_basis(2, 2, {}).moves.size() == 1);
    CHECK(quasi_independence_basis(3, 3, {}).moves.size() == 9);
    // one structural zero on a 2x2 grid leaves no move
    CHECK(quasi_independence_basis(2, 2, {Cell{1, 1}}).moves.empty());
}

TEST_CASE("quasi-independence with diagonal zeros needs degree-3 loops") {
    std::vector<Cell> diag;
    for (int i = 1; i <= 4; ++i) diag.push_back(Cell{i, i});
    MarkovBasis B = quasi_independence_basis(4, 4, diag);
    CHECK(B.certified);
    CHECK(B.moves.size() == 22);
    int maxdeg = 0;
    bool has3 = false;
    for (const Move& m : B.moves) {
        maxdeg = std::max(maxdeg, m.degree());
        has3 = has3 || m.degree() == 3;
    }
    CHECK(maxdeg == 3);
    CHECK(has3);

    // the swap-only subset does not connect the fibers
    Shape s({4, 4});
    Subspace L = Subspace::main_effects(s, [&] {
        std::vector<char> mask(16, 0);
        for (const Cell& z : diag) mask[s.offset(z)] = 1;
        return mask;
    }());
    MarkovBasis swaps;
    swaps.fingerprint = B.fingerprint;
    for (const Move& m : B.moves)
        if (m.degree() == 2) swaps.moves.push_back(m);
    CHECK(certify_all_fibers(L, 6, B));
    CHECK(!certify_all_fibers(L, 6, swaps));
}

TEST_CASE("every produced move is in the configuration kernel") {
    for (const Subspace& L : {datasets::pewee_model1(), datasets::pewee_model2(),
                              datasets::wam_model1(), datasets::wam_model2()}) {
        MarkovBasis B = markov_basis(L);
        CHECK(B.certified);
        CHECK_NOTHROW(validate_basis(B, L));
        CHECK(B.fingerprint == configuration_fingerprint(L));
    }
}

TEST_CASE("assembled basis sizes for the bundled models") {
    CHECK(markov_basis(datasets::pewee_model1()).moves.size() == 36);
    CHECK(markov_basis(datasets::pewee_model2()).moves.size() == 1008);
    CHECK(markov_basis(datasets::wam_model1()).moves.size() == 80);
    CHECK(markov_basis(datasets::wam_model2()).moves.size() == 112);
}

TEST_CASE("saturated model has an empty basis") {
    Shape s({2, 3});
    Subspace sat = Subspace::hierarchical(s, Complex(2, Facets{{1, 2}}));
    CHECK(markov_basis(sat).moves.empty());
}

TEST_CASE("assembly connects all small fibers of the conditional independence model") {
    Shape s({3, 3, 3});
    Subspace L = Subspace::hierarchical(s, Complex(3, Facets{{1, 2}, {2, 3}}));
    MarkovBasis B = assemble_hsm_basis(L);
    CHECK(B.certified);
    CHECK(B.moves.size() == 27);
    CHECK(certify_all_fibers(L, 6, B));
}

TEST_CASE("quasi-independence three-way connects all small fibers") {
    Shape s({3, 3, 3});
    std::vector<char> mask(27, 0);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k)
                if (i == j || j == k) mask[s.offset({i, j, k})] = 1;
    Subspace L = Subspace::main_effects(s, mask);
    MarkovBasis B = markov_basis(L);
    CHECK(B.certified);
    CHECK(certify_all_fibers(L, 6, B));
}

TEST_CASE("split model basis connects all small fibers") {
    Shape s({3, 2, 3});
    SplitSpec spec{Complex(3, Facets{{1, 2, 3}}),
                   {{VertexSet::full(3), VertexSet::of({2})}},
                   {{{VertexSet::full(3), Cell{1}}, {VertexSet::of({1}), VertexSet::of({3})}},
                    {{VertexSet::full(3), Cell{2}}, {VertexSet::of({1, 3})}}}};
    Subspace L = split_model(s, spec);
    MarkovBasis B = markov_basis(L);
    CHECK(B.certified);
    CHECK(certify_all_fibers(L, 6, B));
}

TEST_CASE("fiber enumeration and connectivity agree on a tiny example") {
    Shape s({2, 2});
    Subspace L = Subspace::main_effects(s);
    Table t(s, {2, 1, 1, 2});
    Fiber F = fiber_enumerate(L, t);
    CHECK(F.members.size() == 4);  // x11 ranges over 0..3 given margins (3,3)x(3,3)
    MarkovBasis B = quasi_independence_basis(2, 2, {});
    CHECK(certify_connectivity(F, L, B));
    MarkovBasis empty;
    empty.fingerprint = B.fingerprint;
    CHECK(!certify_connectivity(F, L, empty));
}

TEST_CASE("export and import roundtrip") {
    Subspace L = datasets::pewee_model1();
    MarkovBasis B = markov_basis(L);
    std::string path = std::filesystem::temp_directory_path() / "basis_roundtrip.txt";
    export_basis(B, L, path);
    MarkovBasis C = import_basis(path, L);
    CHECK(C.moves == B.moves);
    CHECK(C.certified);
    std::filesystem::remove(path);
}

TEST_CASE("import rejects rows outside the kernel") {
    Shape s({2, 2});
    Subspace L = Subspace::main_effects(s);
    std::string path = std::filesystem::temp_directory_path() / "basis_bad.txt";
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("1 4\n1 0 0 0\n", f);
    std::fclose(f);
    CHECK_THROWS(import_basis(path, L));
    std::filesystem::remove(path);
}

TEST_CASE("lattice fallback is flagged uncertified") {
    Shape s({3, 3});
    Subspace L = Subspace::main_effects(s);
    L.add_uniform_association(VertexSet::of({1, 2}));
    MarkovBasis B = markov_basis(L);
    CHECK(!B.certified);
    CHECK_NOTHROW(validate_basis(B, L));
    CHECK(!lattice_basis(L).certified);
}

TEST_CASE("fingerprint is deterministic and input-sensitive") {
    Subspace a = datasets::pewee_model1();
    Subspace b = datasets::pewee_model2();
    CHECK(configuration_fingerprint(a) == configuration_fingerprint(datasets::pewee_model1()));
    CHECK(configuration_fingerprint(a) != configuration_fingerprint(b));
}
