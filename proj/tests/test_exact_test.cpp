#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hsm/datasets.hpp"
#include "hsm/exact_test.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

using namespace hsm;

using Facets = std::vector<std::vector<int>>;

TEST_CASE("chain visits the permutation fiber uniformly") {
    // 3x3 tables with all row and column sums 1: six permutation matrices,
    // hypergeometric weights equal, so the chain must be uniform
    Shape s({3, 3});
    Subspace L = Subspace::main_effects(s);
    Table t(s, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    MarkovBasis B = quasi_independence_basis(3, 3, {});
    std::mt19937_64 rng(42);
    std::map<std::vector<Count>, long long> visits;
    Table x = t;
    const long long steps = 1000000;
    // consecutive states are autocorrelated (stay-probability 5/6 here), so
    // count a thinned subsample for which the iid multinomial band is valid
    const long long thin = 25;
    for (long long i = 1; i <= steps; ++i) {
        x = mh_step(x, B, rng);
        if (i % thin == 0) ++visits[x.counts()];
    }
    REQUIRE(visits.size() == 6);
    const double samples = static_cast<double>(steps / thin);
    const double expect = samples / 6.0;
    const double sigma = std::sqrt(samples * (1.0 / 6.0) * (5.0 / 6.0));
    for (const auto& [state, count] : visits)
        CHECK(std::abs(static_cast<double>(count) - expect) <= 4.0 * sigma);
}

TEST_CASE("single step preserves the sufficient statistic and nonnegativity") {
    Table t = datasets::wood_pewee();
    Subspace L = datasets::pewee_model1();
    MarkovBasis B = markov_basis(L);
    std::mt19937_64 rng(7);
    Table x = t;
    for (int i = 0; i < 2000; ++i) x = mh_step(x, B, rng);
    CHECK(x.total() == t.total());
    for (auto D : {std::vector<int>{1, 2}, std::vector<int>{2, 3}}) {
        Table mx = x.marginal(D), mt = t.marginal(D);
        for (std::size_t off = 0; off < mx.cell_count(); ++off) CHECK(mx.at(off) == mt.at(off));
    }
    for (std::size_t off = 0; off < x.cell_count(); ++off) {
        CHECK(x.at(off) >= 0);
        if (x.masked(off)) CHECK(x.at(off) == 0);
    }
}

TEST_CASE("pewee tests give almost-zero p-values") {
    Table t = datasets::wood_pewee();
    ChainConfig cfg;
    cfg.steps = 100000;
    cfg.burn_in = 10000;
    cfg.seed = 1;
    for (const Subspace& L : {datasets::pewee_model1(), datasets::pewee_model2()}) {
        TestResult r = exact_test(t, L, nullptr, markov_basis(L), cfg);
        CHECK(r.p_hat < 0.001);
        CHECK(r.acceptance_rate > 0.05);
    }
}

TEST_CASE("survey split-model test reproduces the published p-value band") {
    Table t = datasets::wam();
    Subspace m1 = datasets::wam_model1();
    Subspace m2 = datasets::wam_model2();
    ChainConfig cfg;
    cfg.steps = 100000;
    cfg.burn_in = 10000;
    cfg.seed = 1;
    cfg.chains = 8;
    TestResult r = exact_test(t, m2, &m1, markov_basis(m2), cfg);
    CHECK(r.observed_statistic == doctest::Approx(1.8507091).epsilon(1e-6));
    CHECK(r.p_hat > 0.36);
    CHECK(r.p_hat < 0.44);
    CHECK(r.ci_halfwidth <= 0.02);
}

TEST_CASE("runs are reproducible for a fixed seed") {
    Table t = datasets::wood_pewee();
    Subspace L = datasets::pewee_model1();
    MarkovBasis B = markov_basis(L);
    ChainConfig cfg;
    cfg.steps = 5000;
    cfg.burn_in = 500;
    cfg.seed = 9;
    TestResult a = exact_test(t, L, nullptr, B, cfg);
    TestResult b = exact_test(t, L, nullptr, B, cfg);
    CHECK(a.p_hat == b.p_hat);
    CHECK(a.samples == b.samples);
    cfg.seed = 10;
    TestResult c = exact_test(t, L, nullptr, B, cfg);
    CHECK(a.samples != c.samples);
}

TEST_CASE("environment seed override wins") {
    Table t = datasets::wood_pewee();
    Subspace L = datasets::pewee_model1();
    MarkovBasis B = markov_basis(L);
    ChainConfig cfg;
    cfg.steps = 3000;
    cfg.burn_in = 300;
    cfg.seed = 1;
    setenv("HSM_SEED", "77", 1);
    TestResult a = exact_test(t, L, nullptr, B, cfg);
    unsetenv("HSM_SEED");
    cfg.seed = 77;
    TestResult b = exact_test(t, L, nullptr, B, cfg);
    CHECK(a.samples == b.samples);
}

TEST_CASE("configuration validation") {
    Table t = datasets::wood_pewee();
    Subspace L = datasets::pewee_model1();
    MarkovBasis B = markov_basis(L);
    ChainConfig cfg;
    cfg.steps = 0;
    CHECK_THROWS(exact_test(t, L, nullptr, B, cfg));
    cfg.steps = 100;
    cfg.burn_in = 100;
    CHECK_THROWS(exact_test(t, L, nullptr, B, cfg));
    cfg.burn_in = 10;
    cfg.chains = 0;
    CHECK_THROWS(exact_test(t, L, nullptr, B, cfg));
    cfg.chains = 1;
    Subspace other = datasets::pewee_model2();
    CHECK_THROWS(exact_test(t, L, &other, B, cfg));  // model2 does not contain model1
}

TEST_CASE("batch means halfwidth shrinks with sample size") {
    std::vector<double> small, big;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 1000; ++i) small.push_back(u(rng));
    for (int i = 0; i < 100000; ++i) big.push_back(u(rng));
    double hs = batch_means_ci(small, 20);
    double hb = batch_means_ci(big, 20);
    CHECK(hb < hs);
    CHECK_THROWS(batch_means_ci(std::vector<double>(10, 0.5), 20));
}

TEST_CASE("histogram rows integrate to one and carry the overlay") {
    Table t = datasets::wood_pewee();
    Subspace L = datasets::pewee_model1();
    ChainConfig cfg;
    cfg.steps = 20000;
    cfg.burn_in = 2000;
    cfg.seed = 2;
    TestResult r = exact_test(t, L, nullptr, markov_basis(L), cfg);
    auto rows = histogram_series(r, 30, 16);
    REQUIRE(rows.size() == 30);
    double mass = 0, width = 2 * rows[0].bin_center;
    for (const auto& row : rows) {
        mass += row.empirical_density * width;
        CHECK(row.chisq_density >= 0);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(histogram_series(r, 0, 16));
}
