#include "hsm/fit.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hsm {

static std::size_t marg_offset(const Shape& s, const Cell& full, VertexSet D) {
    std::size_t off = 0;
    for (int f : D.members())
        off = off * static_cast<std::size_t>(s.level(f)) +
              static_cast<std::size_t>(full[static_cast<std::size_t>(f) - 1] - 1);
    return off;
}

static void check_table(const Subspace& L, const Table& t) {
    if (!(t.shape() == L.shape()) || t.mask() != L.mask())
        throw std::invalid_argument("fit: table shape/mask does not match model");
    if (t.total() <= 0) throw std::invalid_argument("fit: table total must be positive");
}

static std::vector<double> sufficient_statistic(const Subspace& L, const Table& t) {
    const auto& sup = L.support();
    std::vector<double> b;
    b.reserve(L.generators().size());
    for (const auto& g : L.generators()) {
        double s = 0;
        for (std::size_t k = 0; k < sup.size(); ++k)
            s += static_cast<double>(g[k]) * static_cast<double>(t.at(sup[k]));
        b.push_back(s);
    }
    return b;
}

/// max_r |sum_k A_rk (x_k - n p_k)|
static double residual(const Subspace& L, const Table& t, const std::vector<double>& p_sup) {
    const auto& sup = L.support();
    const double n = static_cast<double>(t.total());
    double worst = 0;
    for (const auto& g : L.generators()) {
        double s = 0;
        for (std::size_t k = 0; k < sup.size(); ++k)
            s += static_cast<double>(g[k]) * (static_cast<double>(t.at(sup[k])) - n * p_sup[k]);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

static void finalize(const Subspace& L, const Table& t, const std::vector<double>& p_sup,
                     FitResult& r) {
    const auto& sup = L.support();
    const double n = static_cast<double>(t.total());
    r.p_hat.assign(t.cell_count(), 0.0);
    for (std::size_t k = 0; k < sup.size(); ++k) r.p_hat[sup[k]] = p_sup[k];
    r.b = sufficient_statistic(L, t);
    r.max_residual = residual(L, t, p_sup);
    r.df = static_cast<int>(sup.size()) - L.dim();
    r.loglik = 0;
    r.G2 = 0;
    r.boundary = false;
    for (std::size_t k = 0; k < sup.size(); ++k) {
        double x = static_cast<double>(t.at(sup[k]));
        if (x <= 0) continue;
        if (p_sup[k] <= 0) {
            r.boundary = true;
            r.loglik = -std::numeric_limits<double>::infinity();
            r.G2 = std::numeric_limits<double>::infinity();
            continue;
        }
        r.loglik += x * std::log(p_sup[k]);
        r.G2 += 2.0 * x * std::log(x / (n * p_sup[k]));
    }
}

/// IPF over the facet marginals of the hierarchical structure.
static FitResult fit_ipf(const Subspace& L, const Table& t, const Complex& delta,
                         const FitOptions& opt) {
    const auto& sup = L.support();
    const Shape& shape = L.shape();
    const double n = static_cast<double>(t.total());
    const double tol = opt.tol_scale * n;

    // per-facet grouping of support positions by marginal cell
    struct Facet {
        std::vector<std::size_t> cls_of;  // support position -> class id
        std::vector<double> x_marg;       // observed marginal per class
        std::size_t num_classes = 0;
    };
    std::vector<Facet> facets;
    for (VertexSet D : delta.facets()) {
        Facet f;
        f.cls_of.resize(sup.size());
        std::map<std::size_t, std::size_t> ids;
        std::vector<double> xm;
        for (std::size_t k = 0; k < sup.size(); ++k) {
            Cell c = shape.cell_at(sup[k]);
            std::size_t mo = marg_offset(shape, c, D);
            auto [it, fresh] = ids.emplace(mo, ids.size());
            if (fresh) xm.push_back(0);
            f.cls_of[k] = it->second;
            xm[it->second] += static_cast<double>(t.at(sup[k]));
        }
        f.num_classes = ids.size();
        f.x_marg = std::move(xm);
        facets.push_back(std::move(f));
    }

    std::vector<double> m(sup.size(), n / static_cast<double>(sup.size()));
    FitResult r;
    std::vector<double> cur;
    for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
        double worst = 0;
        for (const Facet& f : facets) {
            cur.assign(f.num_classes, 0.0);
            for (std::size_t k = 0; k < sup.size(); ++k) cur[f.cls_of[k]] += m[k];
            for (std::size_t k = 0; k < sup.size(); ++k) {
                std::size_t c = f.cls_of[k];
                m[k] = (cur[c] > 0) ? m[k] * f.x_marg[c] / cur[c] : 0.0;
            }
        }
        for (const Facet& f : facets) {
            cur.assign(f.num_classes, 0.0);
            for (std::size_t k = 0; k < sup.size(); ++k) cur[f.cls_of[k]] += m[k];
            for (std::size_t c = 0; c < f.num_classes; ++c)
                worst = std::max(worst, std::abs(cur[c] - f.x_marg[c]));
        }
        if (worst <= tol) { r.converged = true; break; }
    }
    r.iterations = std::min(r.iterations, opt.max_iter);
    std::vector<double> p(sup.size());
    for (std::size_t k = 0; k < sup.size(); ++k) p[k] = m[k] / n;
    finalize(L, t, p, r);
    return r;
}

/// Newton / Fisher scoring on the Poisson surrogate log m = A^T theta.
static FitResult fit_scoring(const Subspace& L, const Table& t, const FitOptions& opt) {
    const auto& sup = L.support();
    const std::size_t s = sup.size();
    const std::size_t k = L.generators().size();
    const double n = static_cast<double>(t.total());
    const double tol = opt.tol_scale * n;

    Eigen::MatrixXd A(k, s);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < s; ++c)
            A(r, c) = static_cast<double>(L.generators()[r][c]);
    Eigen::VectorXd x(s);
    for (std::size_t c = 0; c < s; ++c) x(c) = static_cast<double>(t.at(sup[c]));

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
    // the constant generator is row 0 by construction
    theta(0) = std::log(n / static_cast<double>(s));

    auto mean_of = [&](const Eigen::VectorXd& th) {
        Eigen::VectorXd lm = A.transpose() * th;
        return lm.array().exp().matrix().eval();
    };
    auto surrogate = [&](const Eigen::VectorXd& m) {
        double l = -m.sum();
        for (std::size_t c = 0; c < s; ++c)
            if (x(c) > 0) l += x(c) * std::log(m(c));
        return l;
    };

    Eigen::VectorXd m = mean_of(theta);
    double ll = surrogate(m);
    FitResult r;
    double prev_res = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
        Eigen::VectorXd grad = A * (x - m);
        double res = grad.cwiseAbs().maxCoeff();
        if (res <= tol) { r.converged = true; break; }
        if (res >= prev_res * (1 - 1e-12)) {
            if (++stall >= 50) break;  // residual stall: boundary or non-identifiable
        } else {
            stall = 0;
        }
        prev_res = res;

        Eigen::MatrixXd H = A * m.asDiagonal() * A.transpose();
        Eigen::VectorXd step = H.completeOrthogonalDecomposition().solve(grad);
        double alpha = 1.0;
        for (int h = 0; h < 60; ++h) {
            Eigen::VectorXd th2 = theta + alpha * step;
            Eigen::VectorXd m2 = mean_of(th2);
            double ll2 = surrogate(m2);
            if (std::isfinite(ll2) && ll2 >= ll - 1e-14 * std::abs(ll)) {
                theta = th2;
                m = m2;
                ll = ll2;
                break;
            }
            alpha /= 2;
        }
    }
    r.iterations = std::min(r.iterations, opt.max_iter);
    double total = m.sum();
    std::vector<double> p(s);
    for (std::size_t c = 0; c < s; ++c) p[c] = m(c) / total;
    finalize(L, t, p, r);
    if (!r.converged && r.max_residual > tol) r.boundary = r.boundary || stall >= 50;
    return r;
}

FitResult fit_component(const Subspace& L, const Table& t, const FitOptions& opt) {
    check_table(L, t);
    if (static_cast<std::size_t>(L.dim()) == L.support().size()) {
        // saturated: p_hat = x/n
        FitResult r;
        const auto& sup = L.support();
        std::vector<double> p(sup.size());
        for (std::size_t k = 0; k < sup.size(); ++k)
            p[k] = static_cast<double>(t.at(sup[k])) / static_cast<double>(t.total());
        r.converged = true;
        r.iterations = 0;
        finalize(L, t, p, r);
        return r;
    }
    if (auto delta = L.hierarchical_structure()) return fit_ipf(L, t, *delta, opt);
    return fit_scoring(L, t, opt);
}

FitResult fit_hsm(const Subspace& L, const Table& t, const FitOptions& opt) {
    check_table(L, t);
    ModelDecomposition d = decompose(L);
    if (d.components.size() == 1) return fit_component(L, t, opt);

    const Shape& shape = L.shape();
    const double n = static_cast<double>(t.total());

    std::vector<FitResult> comp_fits;
    std::vector<Table> comp_tables;
    for (std::size_t c = 0; c < d.components.size(); ++c) {
        Table tc = t.marginal(d.components[c].members());
        comp_fits.push_back(fit_component(d.component_models[c], tc, opt));
        comp_tables.push_back(std::move(tc));
    }
    std::vector<Table> div_tables;
    for (VertexSet S : d.dividers) div_tables.push_back(t.marginal(S.members()));

    const auto& sup = L.support();
    std::vector<double> p(sup.size());
    bool zero_divider = false;
    for (std::size_t k = 0; k < sup.size(); ++k) {
        Cell cell = shape.cell_at(sup[k]);
        double v = 1.0;
        for (std::size_t s = 0; s < d.dividers.size(); ++s) {
            Count xs = div_tables[s].at(
                div_tables[s].shape().num_factors() == 0
                    ? 0
                    : marg_offset(shape, cell, d.dividers[s]));
            if (xs <= 0) { v = 0; zero_divider = true; break; }
            v /= static_cast<double>(xs) / n;
        }
        if (v != 0) {
            for (std::size_t c = 0; c < d.components.size(); ++c) {
                std::size_t mo = marg_offset(shape, cell, d.components[c]);
                v *= comp_fits[c].p_hat[mo];
            }
        }
        p[k] = v;
    }

    FitResult r;
    r.converged = true;
    for (const FitResult& f : comp_fits) {
        r.converged = r.converged && f.converged;
        r.iterations = std::max(r.iterations, f.iterations);
        r.boundary = r.boundary || f.boundary;
    }
    finalize(L, t, p, r);
    if (zero_divider) r.boundary = true;
    return r;
}

FitResult fit_partitioned(const Subspace& L, VertexSet Z, const Table& t,
                          const FitOptions& opt) {
    check_table(L, t);
    if (!L.slice_decomposes(Z))
        throw std::invalid_argument("fit_partitioned: model does not decompose across Z-slices");
    const Shape& shape = L.shape();
    const double n = static_cast<double>(t.total());
    std::vector<int> zmembers = Z.members();
    std::vector<int> zlevels;
    for (int f : zmembers) zlevels.push_back(shape.level(f));
    Shape zshape(zlevels);

    std::vector<double> p(t.cell_count(), 0.0);
    FitResult r;
    r.converged = true;
    VertexSet rest = VertexSet::full(L.num_factors()).minus(Z);
    for (std::size_t zo = 0; zo < zshape.cell_count(); ++zo) {
        Cell j = zshape.cell_at(zo);
        Table ts = t.slice(zmembers, j);
        if (ts.total() == 0) continue;  // empty slice carries no mass
        Subspace Ls = L.project_slice(Z, j);
        FitResult fs = Ls.connected_components().size() == 1 ? fit_hsm(Ls, ts, opt)
                                                             : fit_component(Ls, ts, opt);
        double w = static_cast<double>(ts.total()) / n;
        // embed the slice fit
        for (std::size_t so = 0; so < ts.cell_count(); ++so) {
            if (fs.p_hat[so] == 0) continue;
            Cell sc = ts.shape().cell_at(so);
            Cell full(static_cast<std::size_t>(shape.num_factors()));
            std::size_t rpos = 0;
            for (int f = 1; f <= shape.num_factors(); ++f) {
                if (Z.contains(f)) {
                    std::size_t zpos = 0;
                    while (zmembers[zpos] != f) ++zpos;
                    full[static_cast<std::size_t>(f) - 1] = j[zpos];
                } else {
                    full[static_cast<std::size_t>(f) - 1] = sc[rpos++];
                }
            }
            p[shape.offset(full)] = w * fs.p_hat[so];
        }
        r.converged = r.converged && fs.converged;
        r.iterations = std::max(r.iterations, fs.iterations);
        r.boundary = r.boundary || fs.boundary;
    }
    (void)rest;
    const auto& sup = L.support();
    std::vector<double> psup(sup.size());
    for (std::size_t k = 0; k < sup.size(); ++k) psup[k] = p[sup[k]];
    finalize(L, t, psup, r);
    return r;
}

std::pair<double, int> deviance(const Table& t, const Subspace& L_small,
                                const FitResult& small, const Subspace* L_big,
                                const FitResult* big) {
    if (L_big && !L_big->contains(L_small))
        throw std::invalid_argument("deviance: models are not nested");
    const auto& sup = L_small.support();
    const double n = static_cast<double>(t.total());
    double g2 = 0;
    for (std::size_t k = 0; k < sup.size(); ++k) {
        double x = static_cast<double>(t.at(sup[k]));
        if (x <= 0) continue;
        double pb = big ? big->p_hat[sup[k]] : x / n;
        double ps = small.p_hat[sup[k]];
        if (ps <= 0) return {std::numeric_limits<double>::infinity(),
                             (big ? L_big->dim() : static_cast<int>(sup.size())) - L_small.dim()};
        g2 += 2.0 * x * std::log(pb / ps);
    }
    int df = (big ? L_big->dim() : static_cast<int>(sup.size())) - L_small.dim();
    return {g2, df};
}

// ---------------------------------------------------------------------------
// prepared fitter: all structure analysis (exact arithmetic) happens at
// construction; per-sample fits are pure floating-point index arithmetic.

namespace {

struct Plan {
    enum Kind { Sat, Ipf, Part, Score } kind = Score;
    std::size_t nsup = 0;
    double tol_scale = 1e-10;
    int max_iter = 10000;

    struct FacetPlan {
        std::vector<int> cls_of;  // support pos -> class id
        int ncls = 0;
    };
    std::vector<FacetPlan> facets;  // Ipf

    Eigen::MatrixXd A;  // Score

    std::vector<std::vector<int>> slice_pos;  // Part: per level, support pos in slice order
    std::vector<Plan> slices;

    static Plan build(const Subspace& M, const FitOptions& opt) {
        Plan p;
        p.nsup = M.support().size();
        p.tol_scale = opt.tol_scale;
        p.max_iter = opt.max_iter;
        if (static_cast<std::size_t>(M.dim()) == p.nsup) {
            p.kind = Sat;
            return p;
        }
        if (auto delta = M.hierarchical_structure()) {
            p.kind = Ipf;
            const Shape& shape = M.shape();
            for (VertexSet D : delta->facets()) {
                FacetPlan f;
                f.cls_of.resize(p.nsup);
                std::map<std::size_t, int> ids;
                for (std::size_t k = 0; k < p.nsup; ++k) {
                    Cell c = shape.cell_at(M.support()[k]);
                    auto [it, fresh] = ids.emplace(marg_offset(shape, c, D),
                                                   static_cast<int>(ids.size()));
                    (void)fresh;
                    f.cls_of[k] = it->second;
                }
                f.ncls = static_cast<int>(ids.size());
                p.facets.push_back(std::move(f));
            }
            return p;
        }
        for (int z = 1; z <= M.num_factors(); ++z) {
            VertexSet Z = VertexSet::of({z});
            if (!M.slice_decomposes(Z)) continue;
            p.kind = Part;
            const Shape& shape = M.shape();
            VertexSet rest = VertexSet::full(M.num_factors()).minus(Z);
            for (int j = 1; j <= shape.level(z); ++j) {
                std::vector<std::pair<std::size_t, int>> order;  // (slice offset, pos)
                for (std::size_t k = 0; k < p.nsup; ++k) {
                    Cell c = shape.cell_at(M.support()[k]);
                    if (c[static_cast<std::size_t>(z) - 1] != j) continue;
                    order.push_back({marg_offset(shape, c, rest), static_cast<int>(k)});
                }
                std::sort(order.begin(), order.end());
                std::vector<int> pos;
                for (auto [so, k] : order) pos.push_back(k);
                p.slice_pos.push_back(std::move(pos));
                p.slices.push_back(build(M.project_slice(Z, {j}), opt));
            }
            return p;
        }
        p.kind = Score;
        const std::size_t kgen = M.generators().size();
        p.A.resize(kgen, p.nsup);
        for (std::size_t r = 0; r < kgen; ++r)
            for (std::size_t c = 0; c < p.nsup; ++c)
                p.A(r, c) = static_cast<double>(M.generators()[r][c]);
        return p;
    }

    /// x: counts in support order with sum n > 0; fills p (support order).
    bool fit(const std::vector<double>& x, double n, std::vector<double>& p) const {
        p.resize(nsup);
        switch (kind) {
            case Sat:
                for (std::size_t k = 0; k < nsup; ++k) p[k] = x[k] / n;
                return true;
            case Ipf: {
                const double tol = tol_scale * n;
                std::vector<double> m(nsup, n / static_cast<double>(nsup));
                std::vector<std::vector<double>> xm(facets.size());
                for (std::size_t f = 0; f < facets.size(); ++f) {
                    xm[f].assign(static_cast<std::size_t>(facets[f].ncls), 0.0);
                    for (std::size_t k = 0; k < nsup; ++k)
                        xm[f][static_cast<std::size_t>(facets[f].cls_of[k])] += x[k];
                }
                std::vector<double> cur;
                bool done = false;
                for (int it = 0; it < max_iter && !done; ++it) {
                    for (std::size_t f = 0; f < facets.size(); ++f) {
                        const FacetPlan& fp = facets[f];
                        cur.assign(static_cast<std::size_t>(fp.ncls), 0.0);
                        for (std::size_t k = 0; k < nsup; ++k)
                            cur[static_cast<std::size_t>(fp.cls_of[k])] += m[k];
                        for (std::size_t k = 0; k < nsup; ++k) {
                            double c = cur[static_cast<std::size_t>(fp.cls_of[k])];
                            double t = xm[f][static_cast<std::size_t>(fp.cls_of[k])];
                            m[k] = (c > 0) ? m[k] * t / c : 0.0;
                        }
                    }
                    double worst = 0;
                    for (std::size_t f = 0; f < facets.size(); ++f) {
                        const FacetPlan& fp = facets[f];
                        cur.assign(static_cast<std::size_t>(fp.ncls), 0.0);
                        for (std::size_t k = 0; k < nsup; ++k)
                            cur[static_cast<std::size_t>(fp.cls_of[k])] += m[k];
                        for (int c = 0; c < fp.ncls; ++c)
                            worst = std::max(worst,
                                             std::abs(cur[static_cast<std::size_t>(c)] -
                                                      xm[f][static_cast<std::size_t>(c)]));
                    }
                    done = worst <= tol;
                }
                for (std::size_t k = 0; k < nsup; ++k) p[k] = m[k] / n;
                return done;
            }
            case Part: {
                std::fill(p.begin(), p.end(), 0.0);
                bool ok = true;
                std::vector<double> xs, ps;
                for (std::size_t j = 0; j < slices.size(); ++j) {
                    const auto& pos = slice_pos[j];
                    xs.resize(pos.size());
                    double nj = 0;
                    for (std::size_t i = 0; i < pos.size(); ++i) {
                        xs[i] = x[static_cast<std::size_t>(pos[i])];
                        nj += xs[i];
                    }
                    if (nj <= 0) continue;
                    ok = slices[j].fit(xs, nj, ps) && ok;
                    double w = nj / n;
                    for (std::size_t i = 0; i < pos.size(); ++i)
                        p[static_cast<std::size_t>(pos[i])] = w * ps[i];
                }
                return ok;
            }
            case Score: {
                const double tol = tol_scale * n;
                const std::size_t kgen = static_cast<std::size_t>(A.rows());
                Eigen::VectorXd xv(nsup);
                for (std::size_t c = 0; c < nsup; ++c) xv(c) = x[c];
                Eigen::VectorXd theta = Eigen::VectorXd::Zero(kgen);
                theta(0) = std::log(n / static_cast<double>(nsup));
                auto mean_of = [&](const Eigen::VectorXd& th) {
                    return (A.transpose() * th).array().exp().matrix().eval();
                };
                auto surrogate = [&](const Eigen::VectorXd& m) {
                    double l = -m.sum();
                    for (std::size_t c = 0; c < nsup; ++c)
                        if (xv(c) > 0) l += xv(c) * std::log(m(c));
                    return l;
                };
                Eigen::VectorXd m = mean_of(theta);
                double ll = surrogate(m);
                bool done = false;
                double prev = std::numeric_limits<double>::infinity();
                int stall = 0;
                for (int it = 0; it < max_iter; ++it) {
                    Eigen::VectorXd grad = A * (xv - m);
                    double res = grad.cwiseAbs().maxCoeff();
                    if (res <= tol) { done = true; break; }
                    if (res >= prev * (1 - 1e-12)) {
                        if (++stall >= 50) break;
                    } else {
                        stall = 0;
                    }
                    prev = res;
                    Eigen::MatrixXd H = A * m.asDiagonal() * A.transpose();
                    Eigen::VectorXd step = H.completeOrthogonalDecomposition().solve(grad);
                    double alpha = 1.0;
                    for (int h = 0; h < 60; ++h) {
                        Eigen::VectorXd th2 = theta + alpha * step;
                        Eigen::VectorXd m2 = mean_of(th2);
                        double ll2 = surrogate(m2);
                        if (std::isfinite(ll2) && ll2 >= ll - 1e-14 * std::abs(ll)) {
                            theta = th2;
                            m = m2;
                            ll = ll2;
                            break;
                        }
                        alpha /= 2;
                    }
                }
                double total = m.sum();
                for (std::size_t c = 0; c < nsup; ++c) p[c] = m(c) / total;
                return done;
            }
        }
        return false;
    }
};

}  // namespace

struct Fitter::Impl {
    Subspace L;
    FitOptions opt;
    ModelDecomposition d;
    std::vector<Plan> plans;
    std::vector<std::vector<int>> comp_of;  // [c]: L-support pos -> comp support pos
    std::vector<std::size_t> comp_size;
    std::vector<std::vector<int>> div_of;   // [s]: L-support pos -> divider cell id
    std::vector<std::size_t> div_size;

    Impl(const Subspace& l, FitOptions o) : L(l), opt(o), d(decompose(L)) {
        const Shape& shape = L.shape();
        const auto& sup = L.support();
        for (std::size_t c = 0; c < d.components.size(); ++c) {
            const Subspace& M = d.component_models[c];
            plans.push_back(Plan::build(M, opt));
            std::map<std::size_t, int> pos;
            for (std::size_t i = 0; i < M.support().size(); ++i)
                pos.emplace(M.support()[i], static_cast<int>(i));
            std::vector<int> map(sup.size());
            for (std::size_t k = 0; k < sup.size(); ++k)
                map[k] = pos.at(marg_offset(shape, shape.cell_at(sup[k]), d.components[c]));
            comp_of.push_back(std::move(map));
            comp_size.push_back(M.support().size());
        }
        for (VertexSet S : d.dividers) {
            std::map<std::size_t, int> ids;
            std::vector<int> map(sup.size());
            for (std::size_t k = 0; k < sup.size(); ++k) {
                std::size_t mo = S.empty() ? 0
                                           : marg_offset(shape, shape.cell_at(sup[k]), S);
                map[k] = ids.emplace(mo, static_cast<int>(ids.size())).first->second;
            }
            div_of.push_back(std::move(map));
            div_size.push_back(ids.size());
        }
    }

    bool fit_probs(const std::vector<double>& xsup, double n, std::vector<double>& p) const {
        const std::size_t s = xsup.size();
        bool ok = true;
        static thread_local std::vector<std::vector<double>> xc, pc;
        xc.resize(plans.size());
        pc.resize(plans.size());
        for (std::size_t c = 0; c < plans.size(); ++c) {
            xc[c].assign(comp_size[c], 0.0);
            for (std::size_t k = 0; k < s; ++k)
                xc[c][static_cast<std::size_t>(comp_of[c][k])] += xsup[k];
            ok = plans[c].fit(xc[c], n, pc[c]) && ok;
        }
        static thread_local std::vector<std::vector<double>> xd;
        xd.resize(div_of.size());
        for (std::size_t sdx = 0; sdx < div_of.size(); ++sdx) {
            xd[sdx].assign(div_size[sdx], 0.0);
            for (std::size_t k = 0; k < s; ++k)
                xd[sdx][static_cast<std::size_t>(div_of[sdx][k])] += xsup[k];
        }
        p.resize(s);
        for (std::size_t k = 0; k < s; ++k) {
            double v = 1.0;
            for (std::size_t sdx = 0; sdx < div_of.size(); ++sdx) {
                double xs = xd[sdx][static_cast<std::size_t>(div_of[sdx][k])];
                if (xs <= 0) { v = 0; break; }
                v /= xs / n;
            }
            if (v != 0)
                for (std::size_t c = 0; c < plans.size(); ++c)
                    v *= pc[c][static_cast<std::size_t>(comp_of[c][k])];
            p[k] = v;
        }
        return ok;
    }
};

Fitter::Fitter(const Subspace& L, FitOptions opt) : impl_(new Impl(L, opt)) {}
Fitter::Fitter(const Fitter& o) : impl_(new Impl(*o.impl_)) {}
Fitter::Fitter(Fitter&&) noexcept = default;
Fitter::~Fitter() = default;
const Subspace& Fitter::model() const { return impl_->L; }

bool Fitter::fit_probs(const std::vector<Count>& support_counts, std::vector<double>& p) const {
    std::vector<double> x(support_counts.size());
    double n = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = static_cast<double>(support_counts[k]);
        n += x[k];
    }
    if (n <= 0) throw std::invalid_argument("fit_probs: empty table");
    return impl_->fit_probs(x, n, p);
}

FitResult Fitter::fit(const Table& t) const {
    check_table(impl_->L, t);
    const auto& sup = impl_->L.support();
    std::vector<double> x(sup.size());
    double n = 0;
    for (std::size_t k = 0; k < sup.size(); ++k) {
        x[k] = static_cast<double>(t.at(sup[k]));
        n += x[k];
    }
    std::vector<double> p;
    FitResult r;
    r.converged = impl_->fit_probs(x, n, p);
    finalize(impl_->L, t, p, r);
    return r;
}

double asymptotic_pvalue(double G2, int df) {
    if (df < 1) throw std::invalid_argument("asymptotic_pvalue: df must be >= 1");
    if (G2 <= 0) return 1.0;
    if (!std::isfinite(G2)) return 0.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, G2));
}

}  // namespace hsm
