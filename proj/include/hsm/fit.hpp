#ifndef HSM_FIT_HPP
#define HSM_FIT_HPP

#include "hsm/subspace.hpp"
#include "hsm/table.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace hsm {

struct FitOptions {
    double tol_scale = 1e-10;  // residual tolerance = tol_scale * n
    int max_iter = 10000;
};

struct FitResult {
    std::vector<double> p_hat;  // full-offset indexed; 0 on masked cells
    std::vector<double> b;      // sufficient statistic A x, one entry per generator
    double loglik = 0;          // multinomial log-likelihood sum x log p_hat
    double G2 = 0;              // deviance against the saturated model on support
    int df = 0;                 // support dimension minus dim(L)
    int iterations = 0;
    bool converged = false;
    bool boundary = false;      // MLE on the boundary (some x>0 cell fitted 0)
    double max_residual = 0;    // max |A x - n A p_hat|
};

/// Fits one model to one table on its own support.  Uses iterative
/// proportional fitting when the model is generated by marginal-cell
/// indicators, Fisher scoring with step halving otherwise.
FitResult fit_component(const Subspace& L, const Table& t, const FitOptions& opt = {});

/// Localized fit: decomposes L, fits each component model on its marginal
/// table and assembles p_hat(i) = prod_C p_hat(i_C) / prod_S (x(i_S)/n).
/// Falls back to fit_component when L is prime.
FitResult fit_hsm(const Subspace& L, const Table& t, const FitOptions& opt = {});

/// Mixture fit for a model that decomposes across the Z-slices:
/// p_hat = sum_j (n_j/n) p_hat_j with each slice fitted separately.
FitResult fit_partitioned(const Subspace& L, VertexSet Z, const Table& t,
                          const FitOptions& opt = {});

/// Deviance of the smaller model against the bigger one (or the saturated
/// model when big is absent), with df = dim difference on the support.
/// Verifies nestedness exactly; throws otherwise.  Returns +inf when some
/// x>0 cell has p_small = 0.
std::pair<double, int> deviance(const Table& t, const Subspace& L_small,
                                const FitResult& small,
                                const Subspace* L_big = nullptr,
                                const FitResult* big = nullptr);

/// Upper-tail chi-square probability.
double asymptotic_pvalue(double G2, int df);

/// Precomputed fitting plan for repeated fits of the same model to many
/// tables (MCMC resampling): the exact-arithmetic structure analysis
/// (decomposition, per-component dispatch) runs once in the constructor,
/// each fit() is numeric only.
class Fitter {
public:
    explicit Fitter(const Subspace& L, FitOptions opt = {});
    Fitter(const Fitter&);
    Fitter(Fitter&&) noexcept;
    ~Fitter();

    FitResult fit(const Table& t) const;

    /// Hot path: counts in support order in, cell probabilities in support
    /// order out.  Returns the convergence flag.
    bool fit_probs(const std::vector<Count>& support_counts, std::vector<double>& p) const;

    const Subspace& model() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hsm

#endif
