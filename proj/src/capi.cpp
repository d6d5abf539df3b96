#include "lobcal/lobcal.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "lobcal/calibrator.hpp"
#include "lobcal/error.hpp"
#include "lobcal/identifiability.hpp"
#include "lobcal/io.hpp"
#include "lobcal/pgps.hpp"
#include "lobcal/validation.hpp"

struct lobcal_trace {
    lobcal::pgps::SimTrace trace;
};
struct lobcal_features {
    lobcal::features::FeatureMatrix matrix;
};
struct lobcal_calibration {
    lobcal::calib::CalibrationResult result;
};
struct lobcal_grid {
    lobcal::ident::GridReport report;
    lobcal::ident::TopQSets sets;
    lobcal::ident::IntersectionStats stats;
    double q = 0.1;
};

namespace {

using namespace lobcal;

thread_local std::string g_last_error;

lobcal_status fail(lobcal_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

// Maps the exception hierarchy onto status codes. Call from a catch block.
lobcal_status translate_current() {
    try {
        throw;
    } catch (const ParameterError& e) {
        return fail(LOBCAL_ERR_PARAMETER, e.what());
    } catch (const ConfigError& e) {
        return fail(LOBCAL_ERR_CONFIG, e.what());
    } catch (const ParseError& e) {
        return fail(LOBCAL_ERR_PARSE, e.what());
    } catch (const IoError& e) {
        return fail(LOBCAL_ERR_IO, e.what());
    } catch (const MissingFeatureError& e) {
        return fail(LOBCAL_ERR_MISSING_FEATURE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(LOBCAL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(LOBCAL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LOBCAL_ERR_INTERNAL, "unknown error");
    }
}

template <class Fn>
lobcal_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        return LOBCAL_OK;
    } catch (...) {
        return translate_current();
    }
}

#define LOBCAL_REQUIRE(ptr) \
    if ((ptr) == nullptr) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "null argument: " #ptr)

pgps::PgpsParams to_cpp(const lobcal_params& p) {
    return {p.delta, p.lambda0, p.c_lambda, p.delta_s, p.alpha, p.mu};
}

lobcal_params to_c(const pgps::PgpsParams& p) {
    return {p.delta, p.lambda0, p.c_lambda, p.delta_s, p.alpha, p.mu};
}

pgps::SimConfig to_cpp(const lobcal_sim_config& c) {
    pgps::SimConfig s;
    s.n_providers = c.n_providers;
    s.n_takers = c.n_takers;
    s.steps = c.steps;
    s.warmup_steps = c.warmup_steps;
    s.p0 = c.p0;
    s.seed = c.seed;
    s.replicate_index = c.replicate_index;
    return s;
}

lobcal_sim_config to_c(const pgps::SimConfig& s) {
    return {s.n_providers, s.n_takers, s.steps, s.warmup_steps, s.p0, s.seed, s.replicate_index};
}

discrepancy::ObjectiveSpec to_cpp(const lobcal_objective_spec& c) {
    discrepancy::ObjectiveSpec s;
    if (c.feature_ids == nullptr && c.n_features > 0) throw ConfigError("objective feature list is null");
    s.feature_ids.assign(c.feature_ids, c.feature_ids + c.n_features);
    switch (c.metric) {
        case LOBCAL_METRIC_WASSERSTEIN: s.metric = discrepancy::Metric::Wasserstein; break;
        case LOBCAL_METRIC_MSE: s.metric = discrepancy::Metric::Mse; break;
        default: throw ConfigError("unknown metric");
    }
    switch (c.aggregation) {
        case LOBCAL_AGG_MAX: s.aggregation = discrepancy::Aggregation::Max; break;
        case LOBCAL_AGG_MEAN: s.aggregation = discrepancy::Aggregation::Mean; break;
        default: throw ConfigError("unknown aggregation");
    }
    switch (c.normalization) {
        case LOBCAL_NORM_TARGET: s.normalization = discrepancy::Normalization::TargetMinMax; break;
        case LOBCAL_NORM_JOINT: s.normalization = discrepancy::Normalization::JointMinMax; break;
        case LOBCAL_NORM_NONE: s.normalization = discrepancy::Normalization::None; break;
        default: throw ConfigError("unknown normalization");
    }
    s.replicates = c.replicates;
    s.validate();
    return s;
}

calib::SearchSpace to_cpp(const lobcal_search_space& c) {
    return {std::vector<double>(c.lo, c.lo + LOBCAL_NUM_PARAMS), std::vector<double>(c.hi, c.hi + LOBCAL_NUM_PARAMS)};
}

calib::PsoSettings to_cpp(const lobcal_pso_settings& c) {
    return {c.population, c.inertia, c.c1, c.c2, c.threads};
}

constexpr int kDefaultFeature[] = {1};

}  // namespace

extern "C" {

const char* lobcal_version(void) { return "0.1.0"; }

const char* lobcal_last_error(void) { return g_last_error.c_str(); }

const char* lobcal_status_string(lobcal_status status) {
    switch (status) {
        case LOBCAL_OK: return "ok";
        case LOBCAL_ERR_INVALID_ARGUMENT: return "invalid argument";
        case LOBCAL_ERR_PARAMETER: return "parameter error";
        case LOBCAL_ERR_CONFIG: return "configuration error";
        case LOBCAL_ERR_PARSE: return "parse error";
        case LOBCAL_ERR_IO: return "i/o error";
        case LOBCAL_ERR_MISSING_FEATURE: return "missing feature";
        case LOBCAL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

uint64_t lobcal_derive_seed(uint64_t master, const char* label, uint64_t index) {
    return derive_seed(master, label == nullptr ? "" : label, index);
}

lobcal_status lobcal_write_text_atomic(const char* path, const char* content) {
    LOBCAL_REQUIRE(path);
    LOBCAL_REQUIRE(content);
    return guarded([&] { io::write_atomic(path, content); });
}

lobcal_status lobcal_preset(const char* name, lobcal_params* out) {
    LOBCAL_REQUIRE(name);
    LOBCAL_REQUIRE(out);
    const auto p = pgps::preset(name);
    if (!p) return fail(LOBCAL_ERR_INVALID_ARGUMENT, std::string("unknown preset '") + name + "' (expected data1..data10)");
    *out = to_c(*p);
    return LOBCAL_OK;
}

lobcal_status lobcal_params_validate(const lobcal_params* params) {
    LOBCAL_REQUIRE(params);
    return guarded([&] { to_cpp(*params).validate(); });
}

void lobcal_sim_config_default(lobcal_sim_config* out) {
    if (out) *out = to_c(pgps::SimConfig{});
}

void lobcal_objective_spec_default(lobcal_objective_spec* out) {
    if (!out) return;
    out->feature_ids = kDefaultFeature;
    out->n_features = 1;
    out->metric = LOBCAL_METRIC_WASSERSTEIN;
    out->aggregation = LOBCAL_AGG_MAX;
    out->normalization = LOBCAL_NORM_TARGET;
    out->replicates = 1;
}

void lobcal_search_space_default(lobcal_search_space* out) {
    if (!out) return;
    const auto s = calib::SearchSpace::pgps_default();
    for (int i = 0; i < LOBCAL_NUM_PARAMS; ++i) {
        out->lo[i] = s.lo[static_cast<std::size_t>(i)];
        out->hi[i] = s.hi[static_cast<std::size_t>(i)];
    }
}

void lobcal_pso_settings_default(lobcal_pso_settings* out) {
    if (!out) return;
    const calib::PsoSettings s;
    *out = {s.population, s.inertia, s.c1, s.c2, s.threads};
}

void lobcal_grid_spec_default(lobcal_grid_spec* out) {
    if (!out) return;
    const ident::GridSpec g;
    out->dims[0] = g.dims[0];
    out->dims[1] = g.dims[1];
    for (int a = 0; a < 2; ++a) {
        out->lo[a] = g.ranges[static_cast<std::size_t>(a)].lo;
        out->hi[a] = g.ranges[static_cast<std::size_t>(a)].hi;
        out->resolution[a] = g.resolution[static_cast<std::size_t>(a)];
    }
    out->base = to_c(g.base);
}

lobcal_status lobcal_precompute_sigma_q(double delta_s, double* out) {
    LOBCAL_REQUIRE(out);
    return guarded([&] { *out = pgps::precompute_sigma_q(delta_s); });
}

lobcal_status lobcal_simulate(const lobcal_params* params, const lobcal_sim_config* config, lobcal_trace** out) {
    LOBCAL_REQUIRE(params);
    LOBCAL_REQUIRE(config);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto t = std::make_unique<lobcal_trace>();
        t->trace = pgps::run_simulation(to_cpp(*params), to_cpp(*config));
        *out = t.release();
    });
}

lobcal_status lobcal_simulate_with_event_log(const lobcal_params* params, const lobcal_sim_config* config,
                                             const char* event_log_path, lobcal_trace** out) {
    LOBCAL_REQUIRE(params);
    LOBCAL_REQUIRE(config);
    LOBCAL_REQUIRE(event_log_path);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        std::string log = io::event_log_header();
        auto t = std::make_unique<lobcal_trace>();
        t->trace = pgps::run_simulation(to_cpp(*params), to_cpp(*config),
                                        [&](const pgps::Event& e) { log += io::event_log_row(e); });
        io::write_atomic(event_log_path, log);
        *out = t.release();
    });
}

void lobcal_trace_free(lobcal_trace* trace) { delete trace; }

size_t lobcal_trace_length(const lobcal_trace* trace) { return trace ? trace->trace.records.size() : 0; }

lobcal_status lobcal_trace_record(const lobcal_trace* trace, size_t i, int64_t out[5]) {
    LOBCAL_REQUIRE(trace);
    LOBCAL_REQUIRE(out);
    if (i >= trace->trace.records.size()) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "trace index out of range");
    const auto& r = trace->trace.records[i];
    out[0] = r.best_bid;
    out[1] = r.best_ask;
    out[2] = r.traded_volume;
    out[3] = r.best_bid_volume;
    out[4] = r.best_ask_volume;
    return LOBCAL_OK;
}

lobcal_status lobcal_trace_write_csv(const lobcal_trace* trace, const char* path) {
    LOBCAL_REQUIRE(trace);
    LOBCAL_REQUIRE(path);
    return guarded([&] { io::write_atomic(path, io::trace_csv(trace->trace)); });
}

lobcal_status lobcal_trace_write_metadata(const lobcal_trace* trace, const char* path) {
    LOBCAL_REQUIRE(trace);
    LOBCAL_REQUIRE(path);
    return guarded([&] { io::write_atomic(path, io::trace_metadata(trace->trace).dump(2) + "\n"); });
}

lobcal_status lobcal_trace_read_csv(const char* path, lobcal_trace** out) {
    LOBCAL_REQUIRE(path);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto t = std::make_unique<lobcal_trace>();
        t->trace = io::parse_trace_csv(io::read_file(path), path);
        *out = t.release();
    });
}

lobcal_status lobcal_features_extract(const lobcal_trace* trace, const int* feature_ids, size_t n,
                                      lobcal_features** out) {
    LOBCAL_REQUIRE(trace);
    LOBCAL_REQUIRE(feature_ids);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto f = std::make_unique<lobcal_features>();
        f->matrix = features::extract(trace->trace, std::span<const int>(feature_ids, n));
        *out = f.release();
    });
}

lobcal_status lobcal_features_read(const char* path, lobcal_features** out) {
    LOBCAL_REQUIRE(path);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto f = std::make_unique<lobcal_features>();
        f->matrix = io::read_feature_source(path);
        *out = f.release();
    });
}

lobcal_status lobcal_features_write_csv(const lobcal_features* features, const char* path) {
    LOBCAL_REQUIRE(features);
    LOBCAL_REQUIRE(path);
    return guarded([&] { io::write_atomic(path, io::features_csv(features->matrix)); });
}

void lobcal_features_free(lobcal_features* features) { delete features; }

int lobcal_features_has(const lobcal_features* features, int feature_id) {
    return features != nullptr && features->matrix.has(feature_id) ? 1 : 0;
}

size_t lobcal_features_length(const lobcal_features* features, int feature_id) {
    if (features == nullptr || !features->matrix.has(feature_id)) return 0;
    return features->matrix.at(feature_id).length();
}

lobcal_status lobcal_features_values(const lobcal_features* features, int feature_id, double* out, size_t capacity) {
    LOBCAL_REQUIRE(features);
    LOBCAL_REQUIRE(out);
    return guarded([&] {
        const auto& v = features->matrix.at(feature_id).values;
        if (capacity < v.size()) throw ConfigError("output buffer too small");
        std::copy(v.begin(), v.end(), out);
    });
}

lobcal_status lobcal_features_require(const lobcal_features* features, const int* feature_ids, size_t n) {
    LOBCAL_REQUIRE(features);
    LOBCAL_REQUIRE(feature_ids);
    return guarded([&] { features->matrix.require(std::span<const int>(feature_ids, n)); });
}

lobcal_status lobcal_wasserstein(const double* x, size_t nx, const double* y, size_t ny, double* out) {
    LOBCAL_REQUIRE(x);
    LOBCAL_REQUIRE(y);
    LOBCAL_REQUIRE(out);
    return guarded([&] {
        *out = discrepancy::wasserstein(std::span<const double>(x, nx), std::span<const double>(y, ny));
    });
}

lobcal_status lobcal_mse(const double* x, size_t nx, const double* y, size_t ny, double* out) {
    LOBCAL_REQUIRE(x);
    LOBCAL_REQUIRE(y);
    LOBCAL_REQUIRE(out);
    return guarded([&] { *out = discrepancy::mse(std::span<const double>(x, nx), std::span<const double>(y, ny)); });
}

lobcal_status lobcal_evaluate_objective(const lobcal_objective_spec* spec, const lobcal_features* target,
                                        const lobcal_params* params, const lobcal_sim_config* config,
                                        double* aggregate, double* per_feature) {
    LOBCAL_REQUIRE(spec);
    LOBCAL_REQUIRE(target);
    LOBCAL_REQUIRE(params);
    LOBCAL_REQUIRE(config);
    LOBCAL_REQUIRE(aggregate);
    return guarded([&] {
        const auto r = discrepancy::evaluate_objective(to_cpp(*spec), target->matrix, to_cpp(*params), to_cpp(*config));
        *aggregate = r.aggregate;
        if (per_feature) std::copy(r.values.begin(), r.values.end(), per_feature);
    });
}

lobcal_status lobcal_validate(const lobcal_features* target, const lobcal_features* simulated, lobcal_validation* out) {
    LOBCAL_REQUIRE(target);
    LOBCAL_REQUIRE(simulated);
    LOBCAL_REQUIRE(out);
    return guarded([&] {
        const auto r = validation::validate(target->matrix, simulated->matrix);
        *out = lobcal_validation{};
        out->n_features = r.feature_ids.size();
        for (std::size_t i = 0; i < r.feature_ids.size(); ++i) {
            out->feature_ids[i] = r.feature_ids[i];
            out->wasserstein[i] = r.wasserstein[i];
            out->mse[i] = r.mse[i];
        }
        out->mean_wasserstein = r.mean_wasserstein;
        out->mean_mse = r.mean_mse;
    });
}

lobcal_status lobcal_validation_write(const lobcal_validation* report, const char* path) {
    LOBCAL_REQUIRE(report);
    LOBCAL_REQUIRE(path);
    if (report->n_features > LOBCAL_NUM_FEATURES) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "too many features");
    return guarded([&] {
        validation::ValidationReport r;
        r.feature_ids.assign(report->feature_ids, report->feature_ids + report->n_features);
        r.wasserstein.assign(report->wasserstein, report->wasserstein + report->n_features);
        r.mse.assign(report->mse, report->mse + report->n_features);
        r.mean_wasserstein = report->mean_wasserstein;
        r.mean_mse = report->mean_mse;
        auto j = io::to_json(r);
        j.erase("normalization_bounds");
        io::write_atomic(path, j.dump(2) + "\n");
    });
}

lobcal_status lobcal_calibrate(const lobcal_features* target, const lobcal_objective_spec* spec,
                               const lobcal_search_space* space, const lobcal_pso_settings* pso,
                               const lobcal_sim_config* base, int64_t budget, uint64_t seed, lobcal_calibration** out) {
    LOBCAL_REQUIRE(target);
    LOBCAL_REQUIRE(spec);
    LOBCAL_REQUIRE(space);
    LOBCAL_REQUIRE(pso);
    LOBCAL_REQUIRE(base);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<lobcal_calibration>();
        c->result = calib::calibrate(target->matrix, to_cpp(*spec), to_cpp(*space), budget, seed, to_cpp(*base),
                                     to_cpp(*pso));
        *out = c.release();
    });
}

void lobcal_calibration_free(lobcal_calibration* cal) { delete cal; }

lobcal_status lobcal_calibration_best(const lobcal_calibration* cal, lobcal_params* params, double* value) {
    LOBCAL_REQUIRE(cal);
    if (params) *params = to_c(cal->result.best_params);
    if (value) *value = cal->result.best_value;
    return LOBCAL_OK;
}

size_t lobcal_calibration_history_length(const lobcal_calibration* cal) {
    return cal ? cal->result.history.size() : 0;
}

lobcal_status lobcal_calibration_history(const lobcal_calibration* cal, double* out, size_t capacity) {
    LOBCAL_REQUIRE(cal);
    LOBCAL_REQUIRE(out);
    const auto& h = cal->result.history;
    if (capacity < h.size()) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "output buffer too small");
    std::copy(h.begin(), h.end(), out);
    return LOBCAL_OK;
}

int64_t lobcal_calibration_evaluations(const lobcal_calibration* cal) {
    return cal ? cal->result.evaluations_used : 0;
}

lobcal_status lobcal_calibration_sim_config(const lobcal_calibration* cal, lobcal_sim_config* out) {
    LOBCAL_REQUIRE(cal);
    LOBCAL_REQUIRE(out);
    *out = to_c(cal->result.sim_config);
    return LOBCAL_OK;
}

lobcal_status lobcal_calibration_write(const lobcal_calibration* cal, const char* json_path,
                                       const char* history_csv_path) {
    LOBCAL_REQUIRE(cal);
    return guarded([&] {
        if (json_path) io::write_atomic(json_path, io::to_json(cal->result).dump(2) + "\n");
        if (history_csv_path) io::write_atomic(history_csv_path, io::calibration_history_csv(cal->result));
    });
}

lobcal_status lobcal_grid_run(const lobcal_grid_spec* spec, const lobcal_features* target,
                              const lobcal_sim_config* config, double q, uint32_t threads, lobcal_grid** out) {
    LOBCAL_REQUIRE(spec);
    LOBCAL_REQUIRE(target);
    LOBCAL_REQUIRE(config);
    LOBCAL_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
        ident::GridSpec g;
        g.dims = {spec->dims[0], spec->dims[1]};
        g.ranges = {{{spec->lo[0], spec->hi[0]}, {spec->lo[1], spec->hi[1]}}};
        g.resolution = {spec->resolution[0], spec->resolution[1]};
        g.base = to_cpp(spec->base);
        auto grid = std::make_unique<lobcal_grid>();
        grid->q = q;
        grid->report = ident::grid_evaluate(g, target->matrix, to_cpp(*config), threads);
        grid->sets = ident::topq_sets(grid->report, q);
        grid->stats = ident::intersection_stats(grid->sets.masks, features::kFeatureCount);
        *out = grid.release();
    });
}

void lobcal_grid_free(lobcal_grid* grid) { delete grid; }

size_t lobcal_grid_cells(const lobcal_grid* grid) { return grid ? grid->report.cells.size() : 0; }

lobcal_status lobcal_grid_probability(const lobcal_grid* grid, int k, double* probability, int64_t* cardinality) {
    LOBCAL_REQUIRE(grid);
    if (k < 1 || k > features::kFeatureCount) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "K must lie in 1..6");
    const auto& e = grid->stats.estimates[static_cast<std::size_t>(k - 1)];
    if (probability) *probability = e.probability;
    if (cardinality) *cardinality = e.cardinality;
    return LOBCAL_OK;
}

lobcal_status lobcal_grid_beta(const lobcal_grid* grid, int i, double* beta) {
    LOBCAL_REQUIRE(grid);
    LOBCAL_REQUIRE(beta);
    if (i < 2 || i > features::kFeatureCount) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "i must lie in 2..6");
    *beta = grid->stats.beta[static_cast<std::size_t>(i - 2)].value();
    return LOBCAL_OK;
}

lobcal_status lobcal_grid_cell(const lobcal_grid* grid, size_t cell, double coords[2], double d[LOBCAL_NUM_FEATURES]) {
    LOBCAL_REQUIRE(grid);
    if (cell >= grid->report.cells.size()) return fail(LOBCAL_ERR_INVALID_ARGUMENT, "cell index out of range");
    const auto& c = grid->report.cells[cell];
    if (coords) std::copy(c.coords.begin(), c.coords.end(), coords);
    if (d) std::copy(c.d.begin(), c.d.end(), d);
    return LOBCAL_OK;
}

lobcal_status lobcal_grid_write(const lobcal_grid* grid, const char* cells_csv_path, const char* summary_csv_path,
                                const char* metadata_path) {
    LOBCAL_REQUIRE(grid);
    return guarded([&] {
        if (cells_csv_path) io::write_atomic(cells_csv_path, io::grid_csv(grid->report, grid->sets, grid->stats));
        if (summary_csv_path) io::write_atomic(summary_csv_path, io::grid_summary_csv(grid->stats));
        if (metadata_path) io::write_atomic(metadata_path, io::grid_metadata(grid->report, grid->q).dump(2) + "\n");
    });
}

}  // extern "C"
