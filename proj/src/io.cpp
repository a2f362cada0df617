#include "hsm/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hsm::io {

using nlohmann::json;

static json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

static bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

static std::vector<int> int_list(const json& j, const std::string& path, const char* field) {
    if (!j.is_array()) throw std::runtime_error(path + ": '" + field + "' must be an array");
    std::vector<int> v;
    for (const auto& e : j) {
        if (!e.is_number_integer())
            throw std::runtime_error(path + ": '" + field + "' must hold integers");
        v.push_back(e.get<int>());
    }
    return v;
}

static Table table_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    struct Row {
        Cell cell;
        Count count;
        bool zero;
    };
    std::vector<Row> rows;
    std::string line;
    int lineno = 0;
    std::size_t arity = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
        if (stripped.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(stripped);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (lineno == 1 && !fields.empty() && !std::isdigit(static_cast<unsigned char>(fields[0][0])))
            continue;  // header line
        if (fields.size() < 2)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": need i_1..i_m,count");
        if (arity == 0) arity = fields.size() - 1;
        if (fields.size() != arity + 1)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": inconsistent arity");
        Row r;
        r.zero = (fields.back() == "NA");
        try {
            for (std::size_t j = 0; j < arity; ++j) r.cell.push_back(std::stoi(fields[j]));
            r.count = r.zero ? 0 : static_cast<Count>(std::stoll(fields.back()));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number");
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");
    std::vector<int> levels(arity, 2);
    for (const Row& r : rows)
        for (std::size_t j = 0; j < arity; ++j) {
            if (r.cell[j] < 1)
                throw std::runtime_error(path + ": coordinates are 1-based");
            levels[j] = std::max(levels[j], r.cell[j]);
        }
    Shape shape(levels);
    std::vector<Count> counts(shape.cell_count(), 0);
    std::vector<Cell> zeros;
    for (const Row& r : rows) {
        if (r.zero)
            zeros.push_back(r.cell);
        else
            counts[shape.offset(r.cell)] = r.count;
    }
    return Table(shape, std::move(counts), zeros);
}

Table load_table(const std::string& path) {
    if (ends_with(path, ".csv")) return table_from_csv(path);
    json j = read_json(path);
    if (!j.contains("shape") || !j.contains("counts"))
        throw std::runtime_error(path + ": table needs 'shape' and 'counts'");
    Shape shape(int_list(j["shape"], path, "shape"));
    if (!j["counts"].is_array() || j["counts"].size() != shape.cell_count())
        throw std::runtime_error(path + ": 'counts' must hold " +
                                 std::to_string(shape.cell_count()) + " entries");
    std::vector<Count> counts;
    for (const auto& e : j["counts"]) {
        if (!e.is_number_integer())
            throw std::runtime_error(path + ": counts must be integers");
        counts.push_back(e.get<Count>());
    }
    std::vector<Cell> zeros;
    if (j.contains("structural_zeros"))
        for (const auto& z : j["structural_zeros"])
            zeros.push_back(int_list(z, path, "structural_zeros"));
    return Table(shape, std::move(counts), zeros);
}

void save_table(const Table& t, const std::string& path) {
    json j;
    j["shape"] = t.shape().levels();
    j["counts"] = t.counts();
    json zeros = json::array();
    for (std::size_t off = 0; off < t.cell_count(); ++off)
        if (t.masked(off)) zeros.push_back(t.shape().cell_at(off));
    j["structural_zeros"] = zeros;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << j.dump(2) << "\n";
}

Shape model_shape(const std::string& path) {
    json j = read_json(path);
    if (!j.contains("shape")) throw std::runtime_error(path + ": model needs 'shape'");
    return Shape(int_list(j["shape"], path, "shape"));
}

static Subspace split_from_json(const Shape& shape, const json& js, const std::string& path,
                                std::vector<char> mask) {
    std::vector<VertexSet> root;
    for (const auto& c : js.at("root")) root.push_back(VertexSet::of(int_list(c, path, "root")));
    SplitSpec spec{Complex(shape.num_factors(), root), {}, {}};
    for (const auto& z : js.at("Z"))
        spec.Z[VertexSet::of(int_list(z.at("C"), path, "Z.C"))] =
            VertexSet::of(int_list(z.at("Z"), path, "Z.Z"));
    for (const auto& s : js.at("slices")) {
        VertexSet C = VertexSet::of(int_list(s.at("C"), path, "slices.C"));
        Cell level = int_list(s.at("level"), path, "slices.level");
        std::vector<VertexSet> facets;
        for (const auto& f : s.at("facets"))
            facets.push_back(VertexSet::of(int_list(f, path, "slices.facets")));
        spec.slice_complexes[{C, level}] = facets;
    }
    return split_model(shape, spec, std::move(mask));
}

Subspace load_model(const std::string& path, std::vector<char> mask) {
    json j = read_json(path);
    if (!j.contains("shape")) throw std::runtime_error(path + ": model needs 'shape'");
    Shape shape(int_list(j["shape"], path, "shape"));
    try {
        if (j.contains("split")) return split_from_json(shape, j["split"], path, std::move(mask));
        Subspace L = Subspace::main_effects(shape, std::move(mask));
        if (!j.contains("terms")) return L;
        for (const auto& t : j["terms"]) {
            std::string kind = t.at("kind").get<std::string>();
            if (kind == "interaction") {
                L.add_interaction(VertexSet::of(int_list(t.at("D"), path, "D")));
            } else if (kind == "facets") {
                for (const auto& f : t.at("facets"))
                    L.add_interaction(VertexSet::of(int_list(f, path, "facets")));
            } else if (kind == "uniform_assoc") {
                L.add_uniform_association(VertexSet::of(int_list(t.at("D"), path, "D")));
            } else if (kind == "change_point") {
                std::vector<int> cut = int_list(t.at("cut"), path, "cut");
                if (cut.size() != 2) throw std::runtime_error(path + ": 'cut' needs two entries");
                L.add_change_point(VertexSet::of(int_list(t.at("D"), path, "D")), cut[0], cut[1]);
            } else if (kind == "diag") {
                L.add_diagonal(VertexSet::of(int_list(t.at("D"), path, "D")));
            } else if (kind == "csi") {
                L.add_csi(VertexSet::of(int_list(t.at("D"), path, "D")),
                          VertexSet::of(int_list(t.at("B"), path, "B")),
                          int_list(t.at("level"), path, "level"));
            } else if (kind == "covariate") {
                std::vector<long long> phi;
                for (const auto& e : t.at("phi")) phi.push_back(e.get<long long>());
                L.add_covariate(VertexSet::of(int_list(t.at("D"), path, "D")), phi);
            } else {
                throw std::runtime_error(path + ": unknown term kind '" + kind + "'");
            }
        }
        return L;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_fit(const FitResult& r, double n, const std::string& path) {
    json j;
    json fitted = json::array();
    for (double p : r.p_hat) fitted.push_back(n * p);
    j["fitted_counts"] = fitted;
    j["G2"] = r.G2;
    j["df"] = r.df;
    j["loglik"] = r.loglik;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["boundary"] = r.boundary;
    j["max_residual"] = r.max_residual;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << j.dump(2) << "\n";
}

void save_test(const TestResult& r, const std::string& path) {
    json j;
    j["observed_statistic"] = r.observed_statistic;
    j["p_hat"] = r.p_hat;
    j["ci_halfwidth"] = r.ci_halfwidth;
    j["acceptance_rate"] = r.acceptance_rate;
    j["num_samples"] = r.samples.size();
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << j.dump(2) << "\n";
}

void save_histogram(const std::vector<HistogramRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << "bin_center,empirical_density,chisq_density\n";
    out.precision(17);
    for (const HistogramRow& r : rows)
        out << r.bin_center << "," << r.empirical_density << "," << r.chisq_density << "\n";
}

}  // namespace hsm::io
