#include "hsm/datasets.hpp"
#include "hsm/exact_test.hpp"
#include "hsm/fit.hpp"
#include "hsm/markov.hpp"

#include <chrono>
#include <cstdio>

#ifdef HSM_HAVE_OPENMP
#include <omp.h>
#endif

using namespace hsm;

int main() {
#ifdef HSM_HAVE_OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled, serial build\n");
#endif

    // fiber certification: dominated by fiber enumeration + union-find sweeps;
    // parallel over fibers when OpenMP is on
    {
        Shape s({3, 3, 3});
        Subspace L = Subspace::hierarchical(s, Complex(3, std::vector<std::vector<int>>{{1, 2}, {2, 3}}));
        MarkovBasis B = markov_basis(L);
        for (int threads : {1,
#ifdef HSM_HAVE_OPENMP
                            omp_get_max_threads()
#else
                            1
#endif
             }) {
#ifdef HSM_HAVE_OPENMP
            omp_set_num_threads(threads);
#endif
            auto t0 = std::chrono::steady_clock::now();
            bool ok = certify_all_fibers(L, 6, B);
            auto t1 = std::chrono::steady_clock::now();
            std::printf("certify 3x3x3 CI n<=6, %d thread(s): %s, %.2f s\n", threads,
                        ok ? "connected" : "FAILED", std::chrono::duration<double>(t1 - t0).count());
        }
    }

    // chain throughput: per-sample refit cost of the prepared fitter
    {
        Table t = datasets::wam();
        Subspace m2 = datasets::wam_model2();
        Subspace m1 = datasets::wam_model1();
        MarkovBasis B = markov_basis(m2);
        ChainConfig cfg;
        cfg.steps = 20000;
        cfg.burn_in = 2000;
        cfg.seed = 1;
        auto t0 = std::chrono::steady_clock::now();
        TestResult r = exact_test(t, m2, &m1, B, cfg);
        auto t1 = std::chrono::steady_clock::now();
        double dt = std::chrono::duration<double>(t1 - t0).count();
        std::printf("survey-data chain: %lld steps in %.2f s (%.1f us/step), p_hat = %.4f\n",
                    cfg.steps, dt, 1e6 * dt / static_cast<double>(cfg.steps), r.p_hat);
    }
    return 0;
}
