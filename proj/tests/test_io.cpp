#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hsm/datasets.hpp"
#include "hsm/io.hpp"

#include <filesystem>
#include <fstream>

using namespace hsm;

namespace fs = std::filesystem;

static std::string tmp_file(const std::string& name, const std::string& body) {
    std::string path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

TEST_CASE("json table roundtrip keeps counts and mask") {
    Table t = datasets::wood_pewee();
    std::string path = fs::temp_directory_path() / "pewee_rt.json";
    io::save_table(t, path);
    Table u = io::load_table(path);
    CHECK(u.shape() == t.shape());
    CHECK(u.counts() == t.counts());
    CHECK(u.mask() == t.mask());
    fs::remove(path);
}

TEST_CASE("json table parse errors carry context") {
    std::string path = tmp_file("bad_table.json", "{\"shape\":[2,2]}");
    CHECK_THROWS_WITH_AS(io::load_table(path), doctest::Contains("counts"), std::runtime_error);
    fs::remove(path);
    path = tmp_file("bad_table2.json", "{not json");
    CHECK_THROWS_AS(io::load_table(path), std::runtime_error);
    fs::remove(path);
    CHECK_THROWS_AS(io::load_table("/nonexistent/x.json"), std::runtime_error);
}

TEST_CASE("csv ingestion infers shape, defaults and structural zeros") {
    std::string path = tmp_file("t.csv",
                                "i1,i2,count\n"
                                "1,1,5\n"
                                "2,3,7\n"
                                "1,3,NA\n");
    Table t = io::load_table(path);
    CHECK(t.shape().levels() == std::vector<int>{2, 3});
    CHECK(t.at(Cell{1, 1}) == 5);
    CHECK(t.at(Cell{2, 3}) == 7);
    CHECK(t.at(Cell{1, 2}) == 0);  // unlisted
    CHECK(t.masked(Cell{1, 3}));
    CHECK(t.total() == 12);
    fs::remove(path);
}

TEST_CASE("csv rejects inconsistent rows") {
    std::string path = tmp_file("bad.csv", "1,1,5\n1,2,3,9\n");
    CHECK_THROWS_WITH_AS(io::load_table(path), doctest::Contains(":2"), std::runtime_error);
    fs::remove(path);
}

TEST_CASE("model spec terms build the expected spaces") {
    std::string path = tmp_file("m.json",
                                R"({"shape":[3,3,3],"terms":[{"kind":"interaction","D":[1,2]},
                                    {"kind":"uniform_assoc","D":[2,3]}]})");
    Subspace L = io::load_model(path);
    CHECK(L.shape().levels() == std::vector<int>{3, 3, 3});
    CHECK(L.is_saturated(VertexSet::of({1, 2})));
    Subspace want = Subspace::main_effects(Shape({3, 3, 3}));
    want.add_interaction(VertexSet::of({1, 2}));
    want.add_uniform_association(VertexSet::of({2, 3}));
    CHECK(L.same_space(want));
    fs::remove(path);
}

TEST_CASE("facets, diag, change_point, csi and covariate terms parse") {
    std::string path = tmp_file(
        "m2.json",
        R"({"shape":[3,3],"terms":[{"kind":"diag","D":[1,2]},
            {"kind":"change_point","D":[1,2],"cut":[2,2]},
            {"kind":"covariate","D":[1],"phi":[1,2,4]}]})");
    Subspace L = io::load_model(path);
    Subspace want = Subspace::main_effects(Shape({3, 3}));
    want.add_diagonal(VertexSet::of({1, 2}));
    want.add_change_point(VertexSet::of({1, 2}), 2, 2);
    want.add_covariate(VertexSet::of({1}), {1, 2, 4});
    CHECK(L.same_space(want));
    fs::remove(path);

    path = tmp_file("m3.json",
                    R"({"shape":[2,2,2],"terms":[{"kind":"facets","facets":[[1,2],[2,3]]},
                        {"kind":"csi","D":[1,3],"B":[2],"level":[1]}]})");
    Subspace M = io::load_model(path);
    Subspace wantM = Subspace::hierarchical(
        Shape({2, 2, 2}), Complex(3, std::vector<std::vector<int>>{{1, 2}, {2, 3}}));
    wantM.add_csi(VertexSet::of({1, 3}), VertexSet::of({2}), Cell{1});
    CHECK(M.same_space(wantM));
    fs::remove(path);
}

TEST_CASE("split model spec builds the bundled survey model") {
    std::string path = tmp_file(
        "split.json",
        R"({"shape":[2,2,2,2,2,2],"split":{
            "root":[[1,2,3,5],[2,3,4,5],[3,4,5,6]],
            "Z":[{"C":[2,3,4,5],"Z":[3]}],
            "slices":[{"C":[2,3,4,5],"level":[1],"facets":[[2,5],[4,5]]},
                      {"C":[2,3,4,5],"level":[2],"facets":[[2,4,5]]}]}})");
    Subspace L = io::load_model(path);
    CHECK(L.same_space(datasets::wam_model2()));
    fs::remove(path);
}

TEST_CASE("unknown term kind is rejected") {
    std::string path =
        tmp_file("m4.json", R"({"shape":[2,2],"terms":[{"kind":"mystery","D":[1]}]})");
    CHECK_THROWS_WITH_AS(io::load_model(path), doctest::Contains("mystery"), std::runtime_error);
    fs::remove(path);
}

TEST_CASE("mask argument flows into the model") {
    Table t = datasets::wood_pewee();
    std::string path =
        tmp_file("m5.json", R"({"shape":[4,4,4],"terms":[{"kind":"facets","facets":[[1,2],[2,3]]}]})");
    Subspace L = io::load_model(path, t.mask());
    CHECK(L.same_space(datasets::pewee_model1()));
    fs::remove(path);
}

TEST_CASE("fit and test results serialize with full precision") {
    Table t = datasets::wood_pewee();
    FitResult r = fit_hsm(datasets::pewee_model1(), t);
    std::string path = fs::temp_directory_path() / "fit.json";
    io::save_fit(r, static_cast<double>(t.total()), path);
    std::ifstream in(path);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body.find("\"G2\"") != std::string::npos);
    CHECK(body.find("\"df\": 16") != std::string::npos);
    fs::remove(path);

    TestResult tr;
    tr.observed_statistic = 1.5;
    tr.p_hat = 0.25;
    tr.ci_halfwidth = 0.01;
    tr.samples = {1.0, 2.0};
    path = fs::temp_directory_path() / "test.json";
    io::save_test(tr, path);
    std::ifstream in2(path);
    std::string body2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(body2.find("\"num_samples\": 2") != std::string::npos);
    fs::remove(path);
}

TEST_CASE("histogram csv has header and overlay column") {
    std::vector<HistogramRow> rows{{0.5, 0.25, 0.1}, {1.5, 0.75, 0.2}};
    std::string path = fs::temp_directory_path() / "hist.csv";
    io::save_histogram(rows, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "bin_center,empirical_density,chisq_density");
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 2);
    fs::remove(path);
}
