// Exercises the shared library through the C header only.
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "lobcal/lobcal.h"

namespace fs = std::filesystem;

namespace {

lobcal_sim_config small_config() {
    lobcal_sim_config c;
    lobcal_sim_config_default(&c);
    c.steps = 150;
    c.warmup_steps = 50;
    return c;
}

std::string tmp(const char* name) {
    const fs::path d = fs::temp_directory_path() / "lobcal_test_capi";
    fs::create_directories(d);
    return (d / name).string();
}

}  // namespace

TEST_CASE("version and status strings") {
    CHECK(std::string(lobcal_version()) == "0.1.0");
    CHECK(std::string(lobcal_status_string(LOBCAL_OK)) == "ok");
    CHECK(std::string(lobcal_status_string(LOBCAL_ERR_PARSE)) == "parse error");
}

TEST_CASE("null arguments are rejected, free(NULL) is a no-op") {
    CHECK(lobcal_simulate(nullptr, nullptr, nullptr) == LOBCAL_ERR_INVALID_ARGUMENT);
    CHECK(std::string(lobcal_last_error()).find("null argument") != std::string::npos);
    lobcal_trace_free(nullptr);
    lobcal_features_free(nullptr);
    lobcal_calibration_free(nullptr);
    lobcal_grid_free(nullptr);
    CHECK(lobcal_trace_length(nullptr) == 0);
}

TEST_CASE("presets and parameter errors") {
    lobcal_params p;
    REQUIRE(lobcal_preset("data10", &p) == LOBCAL_OK);
    CHECK(p.lambda0 == 87.0);
    CHECK(p.mu == 0.05);
    CHECK(lobcal_preset("data42", &p) == LOBCAL_ERR_INVALID_ARGUMENT);
    p.mu = -1;
    CHECK(lobcal_params_validate(&p) == LOBCAL_ERR_PARAMETER);
    CHECK(std::string(lobcal_last_error()).find("mu") != std::string::npos);
}

TEST_CASE("simulate, extract, write and read back") {
    lobcal_params p;
    lobcal_preset("data1", &p);
    const auto cfg = small_config();
    lobcal_trace* t = nullptr;
    REQUIRE(lobcal_simulate(&p, &cfg, &t) == LOBCAL_OK);
    CHECK(lobcal_trace_length(t) == 150);
    int64_t row[5];
    REQUIRE(lobcal_trace_record(t, 0, row) == LOBCAL_OK);
    CHECK(row[0] < row[1]);
    CHECK(lobcal_trace_record(t, 150, row) == LOBCAL_ERR_INVALID_ARGUMENT);

    const std::string path = tmp("trace.csv");
    REQUIRE(lobcal_trace_write_csv(t, path.c_str()) == LOBCAL_OK);
    REQUIRE(lobcal_trace_write_metadata(t, tmp("trace.meta.json").c_str()) == LOBCAL_OK);
    lobcal_trace* back = nullptr;
    REQUIRE(lobcal_trace_read_csv(path.c_str(), &back) == LOBCAL_OK);
    for (size_t i = 0; i < 150; ++i) {
        int64_t a[5], b[5];
        lobcal_trace_record(t, i, a);
        lobcal_trace_record(back, i, b);
        for (int k = 0; k < 5; ++k) CHECK(a[k] == b[k]);
    }

    const int ids[] = {1, 3};
    lobcal_features* f = nullptr;
    REQUIRE(lobcal_features_extract(t, ids, 2, &f) == LOBCAL_OK);
    CHECK(lobcal_features_has(f, 1));
    CHECK_FALSE(lobcal_features_has(f, 2));
    CHECK(lobcal_features_length(f, 3) == 149);
    std::vector<double> v(149);
    CHECK(lobcal_features_values(f, 3, v.data(), 10) == LOBCAL_ERR_CONFIG);
    CHECK(lobcal_features_values(f, 3, v.data(), v.size()) == LOBCAL_OK);
    const int need[] = {1, 2, 5};
    CHECK(lobcal_features_require(f, need, 3) == LOBCAL_ERR_MISSING_FEATURE);
    CHECK(std::string(lobcal_last_error()) == "missing features: f2, f5");

    lobcal_features_free(f);
    lobcal_trace_free(back);
    lobcal_trace_free(t);
}

TEST_CASE("read errors carry status codes") {
    lobcal_features* f = nullptr;
    CHECK(lobcal_features_read(tmp("does_not_exist.csv").c_str(), &f) == LOBCAL_ERR_IO);
    CHECK(f == nullptr);
    const std::string bad = tmp("bad.csv");
    REQUIRE(lobcal_write_text_atomic(bad.c_str(), "t,f2\n0,1\n1,-3\n") == LOBCAL_OK);
    CHECK(lobcal_features_read(bad.c_str(), &f) == LOBCAL_ERR_PARSE);
    CHECK(std::string(lobcal_last_error()).find(":3:") != std::string::npos);
}

TEST_CASE("distances") {
    const double x[] = {0, 0, 1};
    const double y[] = {1};
    double w = -1;
    REQUIRE(lobcal_wasserstein(x, 3, y, 1, &w) == LOBCAL_OK);
    CHECK(w == doctest::Approx(2.0 / 3.0));
    CHECK(lobcal_wasserstein(x, 0, y, 1, &w) == LOBCAL_ERR_CONFIG);
    double m = -1;
    REQUIRE(lobcal_mse(x, 3, y, 1, &m) == LOBCAL_OK);
    CHECK(m == 1.0);
}

TEST_CASE("objective, calibration and validation") {
    lobcal_params p;
    lobcal_preset("data1", &p);
    auto cfg = small_config();
    lobcal_trace* t = nullptr;
    REQUIRE(lobcal_simulate(&p, &cfg, &t) == LOBCAL_OK);
    const int all[] = {1, 2, 3, 4, 5, 6};
    lobcal_features* target = nullptr;
    REQUIRE(lobcal_features_extract(t, all, 6, &target) == LOBCAL_OK);

    lobcal_objective_spec spec;
    lobcal_objective_spec_default(&spec);
    spec.feature_ids = all;
    spec.n_features = 6;
    double f = -1, per[6];
    REQUIRE(lobcal_evaluate_objective(&spec, target, &p, &cfg, &f, per) == LOBCAL_OK);
    CHECK(f == 0.0);
    spec.metric = static_cast<lobcal_metric>(9);
    CHECK(lobcal_evaluate_objective(&spec, target, &p, &cfg, &f, per) == LOBCAL_ERR_CONFIG);
    spec.metric = LOBCAL_METRIC_WASSERSTEIN;

    lobcal_search_space space;
    lobcal_search_space_default(&space);
    lobcal_pso_settings pso;
    lobcal_pso_settings_default(&pso);
    pso.population = 8;
    spec.n_features = 2;
    lobcal_calibration* cal = nullptr;
    CHECK(lobcal_calibrate(target, &spec, &space, &pso, &cfg, 4, 1, &cal) == LOBCAL_ERR_CONFIG);
    REQUIRE(lobcal_calibrate(target, &spec, &space, &pso, &cfg, 32, 1, &cal) == LOBCAL_OK);
    CHECK(lobcal_calibration_evaluations(cal) == 32);
    CHECK(lobcal_calibration_history_length(cal) == 4);
    std::vector<double> h(4);
    REQUIRE(lobcal_calibration_history(cal, h.data(), h.size()) == LOBCAL_OK);
    lobcal_params best;
    double best_value = -1;
    REQUIRE(lobcal_calibration_best(cal, &best, &best_value) == LOBCAL_OK);
    CHECK(best_value == h.back());
    lobcal_sim_config used;
    REQUIRE(lobcal_calibration_sim_config(cal, &used) == LOBCAL_OK);
    CHECK(used.seed == lobcal_derive_seed(1, "simulation", 0));
    CHECK(lobcal_calibration_write(cal, tmp("cal.json").c_str(), tmp("hist.csv").c_str()) == LOBCAL_OK);

    lobcal_validation v;
    REQUIRE(lobcal_validate(target, target, &v) == LOBCAL_OK);
    CHECK(v.n_features == 6);
    CHECK(v.mean_wasserstein == 0.0);
    CHECK(lobcal_validation_write(&v, tmp("validation.json").c_str()) == LOBCAL_OK);

    lobcal_calibration_free(cal);
    lobcal_features_free(target);
    lobcal_trace_free(t);
}

TEST_CASE("grid through the C API") {
    lobcal_params p;
    lobcal_grid_spec g;
    lobcal_grid_spec_default(&g);
    p = g.base;
    g.resolution[0] = g.resolution[1] = 4;
    auto cfg = small_config();
    lobcal_trace* t = nullptr;
    REQUIRE(lobcal_simulate(&p, &cfg, &t) == LOBCAL_OK);
    const int all[] = {1, 2, 3, 4, 5, 6};
    lobcal_features* target = nullptr;
    REQUIRE(lobcal_features_extract(t, all, 6, &target) == LOBCAL_OK);

    lobcal_grid* grid = nullptr;
    CHECK(lobcal_grid_run(&g, target, &cfg, 0.0, 1, &grid) == LOBCAL_ERR_CONFIG);
    REQUIRE(lobcal_grid_run(&g, target, &cfg, 0.25, 1, &grid) == LOBCAL_OK);
    CHECK(lobcal_grid_cells(grid) == 16);
    double prob = 0;
    int64_t card = 0;
    REQUIRE(lobcal_grid_probability(grid, 1, &prob, &card) == LOBCAL_OK);
    CHECK(card == 4);
    CHECK(prob == 0.25);
    CHECK(lobcal_grid_probability(grid, 7, &prob, &card) == LOBCAL_ERR_INVALID_ARGUMENT);
    double beta = -1;
    CHECK(lobcal_grid_beta(grid, 2, &beta) == LOBCAL_OK);
    CHECK(beta >= 0.0);
    CHECK(beta <= 1.0);
    double coords[2], d[6];
    REQUIRE(lobcal_grid_cell(grid, 15, coords, d) == LOBCAL_OK);
    CHECK(coords[0] == 0.2);
    CHECK(coords[1] == 0.06);
    CHECK(lobcal_grid_write(grid, tmp("cells.csv").c_str(), tmp("summary.csv").c_str(), tmp("meta.json").c_str()) ==
          LOBCAL_OK);

    lobcal_grid_free(grid);
    lobcal_features_free(target);
    lobcal_trace_free(t);
}
