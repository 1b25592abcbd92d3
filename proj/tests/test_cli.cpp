#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hjmm/hjmm.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(HJMM_SOURCE_DIR) + "/configs/";

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("hjmm_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

struct Run {
    hjmm_status status = HJMM_ERR_INTERNAL;
    int exit_code = 1;
    nlohmann::json report;
    std::string csv;
};

Run run(const std::string& config, const fs::path& out, const uint64_t* seed = nullptr)
{
    Run r;
    hjmm_run* h = nullptr;
    r.status = hjmm_run_config((kConfigs + config).c_str(), out.string().c_str(), seed, 0, &h);
    if (r.status == HJMM_OK) {
        r.exit_code = hjmm_run_exit_code(h);
        r.report = nlohmann::json::parse(hjmm_run_report(h));
        r.csv = slurp(hjmm_run_field_path(h));
        hjmm_run_free(h);
    }
    return r;
}

}  // namespace

TEST_CASE("catalog lists seven experiments")
{
    CHECK(hjmm_experiment_count() == 7);
    char* text = nullptr;
    REQUIRE(hjmm_catalog_json(&text) == HJMM_OK);
    const auto cat = nlohmann::json::parse(text);
    hjmm_string_free(text);
    CHECK(cat.size() == 7);
    const char* tag = nullptr;
    const char* desc = nullptr;
    CHECK(hjmm_experiment_info(6, &tag, &desc) == HJMM_OK);
    CHECK(std::string(tag) == "c0");
    CHECK(hjmm_experiment_info(7, &tag, &desc) == HJMM_ERR_CONTRACT);
}

TEST_CASE("handles and error codes")
{
    hjmm_hamiltonian* h = nullptr;
    hjmm_datum* d = nullptr;
    hjmm_grid* g = nullptr;
    hjmm_field* f = nullptr;
    REQUIRE(hjmm_hamiltonian_free_particle(1.0, &h) == HJMM_OK);
    REQUIRE(hjmm_datum_builtin("cos", &d) == HJMM_OK);
    REQUIRE(hjmm_grid_torus(64, 1, &g) == HJMM_OK);
    const double t = 0.5;
    REQUIRE(hjmm_solve(h, d, g, &t, 1, 1, &f) == HJMM_OK);
    const double* v = nullptr;
    std::size_t n = 0;
    REQUIRE(hjmm_field_slice(f, 0, &v, &n) == HJMM_OK);
    CHECK(n == 64);
    CHECK(std::abs(v[0] - 1.0) <= 1e-8);
    CHECK(hjmm_field_slice(f, 3, &v, &n) == HJMM_ERR_CONTRACT);
    CHECK(std::string(hjmm_last_error()).size() > 0);
    hjmm_field_free(f);

    hjmm_datum* bad = nullptr;
    CHECK(hjmm_datum_builtin("no-such-datum", &bad) == HJMM_ERR_CONFIG);
    CHECK(hjmm_datum_from_json("{\"builtin\": 3}", &bad) == HJMM_ERR_CONFIG);
    CHECK(hjmm_grid_torus(64, 1, nullptr) == HJMM_ERR_NULL_ARGUMENT);

    hjmm_hamiltonian* sep = nullptr;
    REQUIRE(hjmm_hamiltonian_from_json("{\"type\": \"separable\", \"convex\": {\"type\": \"free_particle\"},"
                                       " \"concave\": {\"type\": \"quadratic\", \"A\": -1}}",
                                       &sep) == HJMM_OK);
    CHECK(hjmm_hamiltonian_dim(sep) == 2);
    hjmm_hamiltonian_free(sep);
    hjmm_grid_free(g);
    hjmm_datum_free(d);
    hjmm_hamiltonian_free(h);
}

TEST_CASE("config runs and exit codes")
{
    const fs::path out = scratch("runs");
    const Run constant = run("solve_constant.json", out);
    REQUIRE(constant.status == HJMM_OK);
    CHECK(constant.exit_code == 0);
    std::istringstream rows(constant.csv);
    std::string line;
    std::getline(rows, line);
    CHECK(line == "t,x,u,method");
    int count = 0;
    while (std::getline(rows, line)) {
        CHECK(line.find(",0.75,minmax") != std::string::npos);
        ++count;
    }
    CHECK(count == 3 * 64);

    const Run split = run("splitting.json", out);
    REQUIRE(split.status == HJMM_OK);
    CHECK(split.exit_code == 0);
    CHECK(split.report["minmax_value"].get<double>() == -0.25);
    CHECK(std::abs(split.report["probe_residual"].get<double>() - 0.3849) <= 1e-4);

    const Run markov = run("markov_convex.json", out);
    REQUIRE(markov.status == HJMM_OK);
    CHECK(markov.exit_code == 0);
    CHECK(markov.report["residual"]["residual"].get<double>() <= 5e-3);
    CHECK(markov.report["seed"].get<std::uint64_t>() == 7);

    CHECK(run("negative/unknown_experiment.json", out).status == HJMM_ERR_CONFIG);
    CHECK(run("negative/schema_violation.json", out).status == HJMM_ERR_CONFIG);
    CHECK(run("negative/cfl_violation.json", out).status == HJMM_ERR_CFL);
    const Run hat = run("negative/hysteresis_hat.json", out);
    REQUIRE(hat.status == HJMM_OK);
    CHECK(hat.exit_code == 2);
    CHECK_FALSE(hat.report["pass"].get<bool>());
    CHECK(run("no_such_file.json", out).status == HJMM_ERR_CONFIG);
}

TEST_CASE("identical configs give identical CSV")
{
    const uint64_t seed = 3;
    const Run a = run("compare_convex.json", scratch("a"), &seed);
    const Run b = run("compare_convex.json", scratch("b"), &seed);
    REQUIRE(a.status == HJMM_OK);
    CHECK(a.csv == b.csv);
    CHECK(a.report.dump() == b.report.dump());
    CHECK(a.report["seed"].get<std::uint64_t>() == 3);
}
