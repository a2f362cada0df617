#include "hsm/datasets.hpp"
#include "hsm/exact_test.hpp"
#include "hsm/fit.hpp"
#include "hsm/io.hpp"
#include "hsm/markov.hpp"
#include "hsm/subspace.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

namespace fs = std::filesystem;
using namespace hsm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBasis = 4;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BasisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string set_str(VertexSet s) {
    std::string out = "{";
    bool first = true;
    for (int v : s.members()) {
        if (!first) out += ",";
        out += std::to_string(v);
        first = false;
    }
    return out + "}";
}

std::string complex_str(const Complex& H) {
    std::string out;
    for (std::size_t i = 0; i < H.facets().size(); ++i) {
        if (i) out += " ";
        out += set_str(H.facets()[i]);
    }
    return out;
}

Table need_table(const std::string& path) {
    if (path.empty()) throw InputError("--table is required");
    return io::load_table(path);
}

Subspace need_model(const std::string& path, const Table* t) {
    if (path.empty()) throw InputError("--model is required");
    Subspace L = io::load_model(path, t ? t->mask() : std::vector<char>{});
    if (t && !(L.shape() == t->shape()))
        throw InputError(path + ": model shape does not match the table");
    return L;
}

void ensure_out(const std::string& out) {
    if (out.empty()) throw InputError("--out is required");
    fs::create_directories(out);
}

std::string cache_path(const std::string& dir, const Subspace& L) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(configuration_fingerprint(L)));
    return dir + "/" + buf + ".basis";
}

MarkovBasis obtain_basis(const Subspace& L, const std::string& cache, bool allow_lattice) {
    if (!cache.empty()) {
        std::string path = cache_path(cache, L);
        if (fs::exists(path)) {
            std::fprintf(stderr, "basis: using cached %s\n", path.c_str());
            return import_basis(path, L);
        }
    }
    MarkovBasis B = markov_basis(L);
    if (!B.certified && !allow_lattice)
        throw BasisError("only an uncertified lattice basis is available; "
                         "rerun with --allow-lattice-basis to accept it");
    if (!cache.empty()) {
        fs::create_directories(cache);
        export_basis(B, L, cache_path(cache, L));
    }
    return B;
}

int cmd_decompose(const std::string& model_path, const std::vector<std::string>& checks) {
    if (model_path.empty()) throw InputError("--model is required");
    Subspace L = io::load_model(model_path);
    std::printf("dim(L) = %d, support = %zu cells\n", L.dim(), L.support().size());
    ModelDecomposition d = decompose(L);
    if (d.components.size() == 1) {
        std::printf("prime: single component %s\n", set_str(d.components[0]).c_str());
    } else {
        std::printf("components:");
        for (VertexSet C : d.components) std::printf(" %s", set_str(C).c_str());
        std::printf("\ndividers:");
        for (VertexSet S : d.dividers) std::printf(" %s", set_str(S).c_str());
        std::printf("\n");
    }
    auto [ambient, order] = ambient_decomposable(L);
    std::printf("ambient decomposable model: %s\n", complex_str(ambient).c_str());
    if (!L.masked()) {
        Complex closure = L.hierarchical_closure();
        std::printf("hierarchical closure: %s\n", complex_str(closure).c_str());
        std::printf("tight: %s\n", L.is_tight_hsm() ? "yes" : "no");
    } else {
        std::printf("hierarchical closure: skipped (structural zeros present)\n");
        std::printf("tight: %s\n", L.is_tight_hsm() ? "yes" : "no");
    }
    for (const std::string& path : checks) {
        std::ifstream in(path);
        if (!in) throw InputError(path + ": cannot open");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path + ": " + e.what());
        }
        std::vector<std::vector<int>> facets;
        for (const auto& f : j.at("facets")) facets.push_back(f.get<std::vector<int>>());
        Complex delta(L.num_factors(), facets);
        std::printf("is HSM of %s: %s\n", complex_str(delta).c_str(),
                    L.is_hsm_of(delta) ? "yes" : "no");
    }
    return kExitOk;
}

int cmd_fit(const std::string& table_path, const std::string& model_path,
            const std::string& alt_path, const std::string& out) {
    Table t = need_table(table_path);
    Subspace L = need_model(model_path, &t);
    FitResult r = fit_hsm(L, t);
    if (!r.converged) throw NumericalError("fit did not converge");
    std::printf("G2 vs saturated = %.6g, df = %d\n", r.G2, r.df);
    std::printf("loglik = %.6g, iterations = %d, max residual = %.6g%s\n", r.loglik,
                r.iterations, r.max_residual, r.boundary ? ", boundary MLE" : "");
    std::optional<FitResult> ra;
    if (!alt_path.empty()) {
        Subspace A = need_model(alt_path, &t);
        ra = fit_hsm(A, t);
        if (!ra->converged) throw NumericalError("alternative fit did not converge");
        auto [g2, df] = deviance(t, L, r, &A, &*ra);
        std::printf("deviance vs alternative = %.6g, df = %d, asymptotic p = %.6g\n", g2, df,
                    asymptotic_pvalue(g2, df));
    }
    if (!out.empty()) {
        ensure_out(out);
        io::save_fit(r, static_cast<double>(t.total()), out + "/fit.json");
        if (ra) io::save_fit(*ra, static_cast<double>(t.total()), out + "/fit_alt.json");
        std::printf("wrote %s/fit.json\n", out.c_str());
    }
    return kExitOk;
}

int cmd_test(const std::string& table_path, const std::string& model_path,
             const std::string& alt_path, const ChainConfig& cfg, const std::string& cache,
             bool allow_lattice, const std::string& out) {
    Table t = need_table(table_path);
    Subspace L = need_model(model_path, &t);
    std::optional<Subspace> alt;
    if (!alt_path.empty()) alt = need_model(alt_path, &t);
    MarkovBasis B = obtain_basis(L, cache, allow_lattice);
    std::printf("basis: %zu moves, %s\n", B.moves.size(),
                B.certified ? "certified" : "uncertified lattice fallback");
    TestResult r = exact_test(t, L, alt ? &*alt : nullptr, B, cfg);
    std::printf("observed statistic = %.6g\n", r.observed_statistic);
    std::printf("p_hat = %.6g +- %.6g (95%% batch-means CI)\n", r.p_hat, r.ci_halfwidth);
    std::printf("acceptance rate = %.6g, samples = %zu\n", r.acceptance_rate, r.samples.size());
    if (!out.empty()) {
        ensure_out(out);
        io::save_test(r, out + "/test.json");
        int df = fit_hsm(L, t).df;
        if (alt) df -= fit_hsm(*alt, t).df;
        df = std::max(df, 1);
        io::save_histogram(histogram_series(r, 40, df), out + "/histogram.csv");
        std::printf("wrote %s/test.json and %s/histogram.csv\n", out.c_str(), out.c_str());
    }
    return kExitOk;
}

int cmd_basis(const std::string& model_path, const std::string& cache, bool allow_lattice,
              const std::string& out) {
    if (model_path.empty()) throw InputError("--model is required");
    Subspace L = io::load_model(model_path);
    MarkovBasis B = obtain_basis(L, cache, allow_lattice);
    int maxdeg = 0;
    for (const Move& m : B.moves) maxdeg = std::max(maxdeg, m.degree());
    std::printf("moves = %zu, max degree = %d, certified = %s, fingerprint = %016llx\n",
                B.moves.size(), maxdeg, B.certified ? "yes" : "no",
                static_cast<unsigned long long>(B.fingerprint));
    if (!out.empty()) {
        ensure_out(out);
        export_basis(B, L, out + "/basis.txt");
        std::printf("wrote %s/basis.txt\n", out.c_str());
    }
    return kExitOk;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path);
    if (!f) throw InputError(path + ": cannot write");
    f << body;
}

int cmd_datasets(const std::string& out) {
    ensure_out(out);
    io::save_table(datasets::wood_pewee(), out + "/pewee.json");
    io::save_table(datasets::wam(), out + "/wam.json");
    write_text(out + "/pewee_model1.json",
               "{\"shape\":[4,4,4],\"terms\":[{\"kind\":\"facets\",\"facets\":[[1,2],[2,3]]}]}\n");
    write_text(out + "/pewee_model2.json", "{\"shape\":[4,4,4],\"terms\":[]}\n");
    write_text(out + "/wam_model1.json",
               "{\"shape\":[2,2,2,2,2,2],\"terms\":[{\"kind\":\"facets\","
               "\"facets\":[[1,2,3,5],[2,3,4,5],[3,4,5,6]]}]}\n");
    write_text(out + "/wam_model2.json",
               "{\"shape\":[2,2,2,2,2,2],\"split\":{"
               "\"root\":[[1,2,3,5],[2,3,4,5],[3,4,5,6]],"
               "\"Z\":[{\"C\":[2,3,4,5],\"Z\":[3]}],"
               "\"slices\":["
               "{\"C\":[2,3,4,5],\"level\":[1],\"facets\":[[2,5],[4,5]]},"
               "{\"C\":[2,3,4,5],\"level\":[2],\"facets\":[[2,4,5]]}]}}\n");
    std::printf("wrote pewee.json (n = %lld), wam.json (n = %lld) and model specs to %s\n",
                datasets::wood_pewee().total(), datasets::wam().total(), out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical subspace models: decomposition, localized MLE, "
                 "Markov bases, exact conditional tests"};
    app.require_subcommand(1);

    std::string table_path, model_path, alt_path, cache, out;
    std::vector<std::string> checks;
    ChainConfig cfg;
    bool allow_lattice = false;

    auto add_common = [&](CLI::App* c, bool with_table) {
        if (with_table) c->add_option("--table", table_path, "table file (.json or .csv)");
        c->add_option("--model", model_path, "model spec (.json)");
        c->add_option("--out", out, "output directory");
    };

    CLI::App* dec = app.add_subcommand("decompose", "decomposition and closure report");
    add_common(dec, false);
    dec->add_option("--check", checks, "complex JSON to test is_hsm_of against (repeatable)");

    CLI::App* fit = app.add_subcommand("fit", "maximum likelihood fit");
    add_common(fit, true);
    fit->add_option("--alt-model", alt_path, "alternative (larger) model spec");

    CLI::App* test = app.add_subcommand("test", "exact conditional test by MCMC");
    add_common(test, true);
    test->add_option("--alt-model", alt_path, "alternative (larger) model spec");
    test->add_option("--steps", cfg.steps, "chain steps per chain")->capture_default_str();
    test->add_option("--burn-in", cfg.burn_in, "burn-in steps")->capture_default_str();
    test->add_option("--seed", cfg.seed, "RNG seed (HSM_SEED overrides)")->capture_default_str();
    test->add_option("--chains", cfg.chains, "independent chains")->capture_default_str();
    test->add_option("--basis-cache", cache, "basis cache directory");
    test->add_flag("--allow-lattice-basis", allow_lattice, "accept an uncertified lattice basis");

    CLI::App* basis = app.add_subcommand("basis", "build or inspect a Markov basis");
    add_common(basis, false);
    basis->add_option("--basis-cache", cache, "basis cache directory");
    basis->add_flag("--allow-lattice-basis", allow_lattice, "accept an uncertified lattice basis");

    CLI::App* data = app.add_subcommand("datasets", "export bundled datasets and model specs");
    data->add_option("--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dec->parsed()) return cmd_decompose(model_path, checks);
        if (fit->parsed()) return cmd_fit(table_path, model_path, alt_path, out);
        if (test->parsed())
            return cmd_test(table_path, model_path, alt_path, cfg, cache, allow_lattice, out);
        if (basis->parsed()) return cmd_basis(model_path, cache, allow_lattice, out);
        if (data->parsed()) return cmd_datasets(out);
    } catch (const BasisError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBasis;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitOk;
}
