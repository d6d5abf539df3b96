// lobcal command-line front end. Talks to the library only through lobcal.h.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lobcal/lobcal.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* const kParamNames[LOBCAL_NUM_PARAMS] = {"delta", "lambda0", "c_lambda", "delta_s", "alpha", "mu"};

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(lobcal_status s, const std::string& what) {
    if (s != LOBCAL_OK) throw CliError(what + ": " + lobcal_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using TracePtr = std::unique_ptr<lobcal_trace, Deleter<lobcal_trace, lobcal_trace_free>>;
using FeaturesPtr = std::unique_ptr<lobcal_features, Deleter<lobcal_features, lobcal_features_free>>;
using CalibrationPtr = std::unique_ptr<lobcal_calibration, Deleter<lobcal_calibration, lobcal_calibration_free>>;
using GridPtr = std::unique_ptr<lobcal_grid, Deleter<lobcal_grid, lobcal_grid_free>>;

double* param_slot(lobcal_params& p, int i) {
    double* slots[LOBCAL_NUM_PARAMS] = {&p.delta, &p.lambda0, &p.c_lambda, &p.delta_s, &p.alpha, &p.mu};
    return slots[i];
}

ordered_json params_json(lobcal_params p) {
    ordered_json j;
    for (int i = 0; i < LOBCAL_NUM_PARAMS; ++i) j[kParamNames[i]] = *param_slot(p, i);
    return j;
}

ordered_json sim_json(const lobcal_sim_config& c) {
    return {{"n_providers", c.n_providers}, {"n_takers", c.n_takers}, {"steps", c.steps},
            {"warmup_steps", c.warmup_steps}, {"p0", c.p0}, {"seed", c.seed}, {"replicate_index", c.replicate_index}};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<int> parse_features(const std::string& list) {
    std::vector<int> ids;
    for (std::string item : split(list, ',')) {
        if (!item.empty() && (item[0] == 'f' || item[0] == 'F')) item.erase(0, 1);
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || v < 1 || v > LOBCAL_NUM_FEATURES)
            throw CliError("--features: '" + item + "' is not a feature id in 1..6");
        ids.push_back(v);
    }
    if (ids.empty()) throw CliError("--features: empty list");
    return ids;
}

int parse_dim(const std::string& s) {
    for (int i = 0; i < LOBCAL_NUM_PARAMS; ++i)
        if (s == kParamNames[i]) return i;
    if (s.size() == 1 && s[0] >= '0' && s[0] <= '5') return s[0] - '0';
    throw CliError("--dims: unknown parameter '" + s + "'");
}

FeaturesPtr read_features(const std::string& path) {
    if (!fs::exists(path)) throw CliError("file not found: " + path);
    lobcal_features* f = nullptr;
    check(lobcal_features_read(path.c_str(), &f), "reading " + path);
    return FeaturesPtr(f);
}

FeaturesPtr extract_all(const lobcal_trace* trace) {
    const int all[] = {1, 2, 3, 4, 5, 6};
    lobcal_features* f = nullptr;
    check(lobcal_features_extract(trace, all, 6, &f), "extracting features");
    return FeaturesPtr(f);
}

TracePtr simulate(const lobcal_params& p, const lobcal_sim_config& c) {
    lobcal_trace* t = nullptr;
    check(lobcal_simulate(&p, &c, &t), "simulation");
    return TracePtr(t);
}

void write_json(const fs::path& path, const ordered_json& j) {
    const std::string text = j.dump(2) + "\n";
    check(lobcal_write_text_atomic(path.string().c_str(), text.c_str()), "writing " + path.string());
}

ordered_json validation_json(const lobcal_validation& v) {
    ordered_json per = ordered_json::array();
    for (std::size_t i = 0; i < v.n_features; ++i)
        per.push_back({{"feature", v.feature_ids[i]}, {"wasserstein", v.wasserstein[i]}, {"mse", v.mse[i]}});
    return {{"features", per}, {"mean_wasserstein", v.mean_wasserstein}, {"mean_mse", v.mean_mse}};
}

void print_validation(const lobcal_validation& v) {
    std::printf("feature,wasserstein,mse\n");
    for (std::size_t i = 0; i < v.n_features; ++i)
        std::printf("f%d,%.6g,%.6g\n", v.feature_ids[i], v.wasserstein[i], v.mse[i]);
    std::printf("mean,%.6g,%.6g\n", v.mean_wasserstein, v.mean_mse);
}

struct Common {
    std::uint64_t seed = 1;
    std::string out = ".";
};

struct GenerateOpts {
    std::string preset;
    std::vector<std::optional<double>> overrides = std::vector<std::optional<double>>(LOBCAL_NUM_PARAMS);
    std::int64_t steps = 3600;
    std::int64_t warmup = 200;
    bool event_log = false;
};

struct CalibrateOpts {
    std::string target;
    std::string features = "1";
    std::int64_t budget = 10000;
    int replicates = 1;
    std::string metric = "w";
    std::string agg = "max";
    std::string norm = "target";
    std::optional<std::int64_t> steps;
    std::int64_t warmup = 200;
    int population = 40;
    unsigned threads = 1;
};

struct EvaluateOpts {
    std::string target;
    std::string simulated;
};

struct GridOpts {
    std::string target;
    int resolution = 100;
    double q = 0.1;
    std::string dims = "alpha,mu";
    std::int64_t steps = 3600;
    std::int64_t warmup = 200;
    unsigned threads = 1;
};

ordered_json run_header(const char* command, const Common& c) {
    return {{"command", command}, {"lobcal_version", lobcal_version()}, {"seed", c.seed}};
}

void cmd_generate(const Common& c, const GenerateOpts& o) {
    lobcal_params p;
    if (!o.preset.empty()) {
        check(lobcal_preset(o.preset.c_str(), &p), "--preset");
    } else {
        lobcal_grid_spec g;
        lobcal_grid_spec_default(&g);
        p = g.base;
    }
    for (int i = 0; i < LOBCAL_NUM_PARAMS; ++i)
        if (o.overrides[static_cast<std::size_t>(i)]) *param_slot(p, i) = *o.overrides[static_cast<std::size_t>(i)];
    check(lobcal_params_validate(&p), "parameters");

    lobcal_sim_config cfg;
    lobcal_sim_config_default(&cfg);
    cfg.steps = o.steps;
    cfg.warmup_steps = o.warmup;
    cfg.seed = lobcal_derive_seed(c.seed, "simulation", 0);

    const fs::path out(c.out);
    lobcal_trace* raw = nullptr;
    if (o.event_log) {
        check(lobcal_simulate_with_event_log(&p, &cfg, (out / "events.csv").string().c_str(), &raw), "simulation");
    } else {
        check(lobcal_simulate(&p, &cfg, &raw), "simulation");
    }
    TracePtr trace(raw);
    check(lobcal_trace_write_csv(trace.get(), (out / "trace.csv").string().c_str()), "writing trace");
    check(lobcal_trace_write_metadata(trace.get(), (out / "trace.meta.json").string().c_str()), "writing metadata");
    FeaturesPtr feats = extract_all(trace.get());
    check(lobcal_features_write_csv(feats.get(), (out / "features.csv").string().c_str()), "writing features");

    ordered_json run = run_header("generate", c);
    run["preset"] = o.preset.empty() ? ordered_json(nullptr) : ordered_json(o.preset);
    run["params"] = params_json(p);
    run["sim_config"] = sim_json(cfg);
    run["outputs"] = {"trace.csv", "trace.meta.json", "features.csv"};
    if (o.event_log) run["outputs"].push_back("events.csv");
    write_json(out / "run.json", run);
    std::printf("%s", run.dump(2).c_str());
    std::printf("\n");
}

void cmd_calibrate(const Common& c, const CalibrateOpts& o) {
    FeaturesPtr target = read_features(o.target);
    const std::vector<int> ids = parse_features(o.features);
    check(lobcal_features_require(target.get(), ids.data(), ids.size()), "target");

    lobcal_objective_spec spec;
    lobcal_objective_spec_default(&spec);
    spec.feature_ids = ids.data();
    spec.n_features = ids.size();
    spec.replicates = o.replicates;
    if (o.metric == "w") spec.metric = LOBCAL_METRIC_WASSERSTEIN;
    else if (o.metric == "mse") spec.metric = LOBCAL_METRIC_MSE;
    if (o.agg == "mean") spec.aggregation = LOBCAL_AGG_MEAN;
    if (o.norm == "joint") spec.normalization = LOBCAL_NORM_JOINT;
    else if (o.norm == "none") spec.normalization = LOBCAL_NORM_NONE;

    lobcal_search_space space;
    lobcal_search_space_default(&space);
    lobcal_pso_settings pso;
    lobcal_pso_settings_default(&pso);
    pso.population = o.population;
    pso.threads = o.threads;
    lobcal_sim_config base;
    lobcal_sim_config_default(&base);
    base.steps = o.steps ? *o.steps : static_cast<std::int64_t>(lobcal_features_length(target.get(), 1));
    if (base.steps == 0) base.steps = static_cast<std::int64_t>(lobcal_features_length(target.get(), ids[0]));
    base.warmup_steps = o.warmup;
    if (o.budget < o.population)
        throw CliError("--budget " + std::to_string(o.budget) + " is smaller than the population " +
                       std::to_string(o.population));

    lobcal_calibration* raw = nullptr;
    check(lobcal_calibrate(target.get(), &spec, &space, &pso, &base, o.budget, c.seed, &raw), "calibration");
    CalibrationPtr cal(raw);

    const fs::path out(c.out);
    check(lobcal_calibration_write(cal.get(), (out / "calibration.json").string().c_str(),
                                   (out / "history.csv").string().c_str()),
          "writing calibration");

    lobcal_params best;
    double best_value = 0.0;
    check(lobcal_calibration_best(cal.get(), &best, &best_value), "calibration");
    lobcal_sim_config vcfg = base;
    vcfg.seed = lobcal_derive_seed(c.seed, "validation", 0);
    TracePtr trace = simulate(best, vcfg);
    FeaturesPtr sim = extract_all(trace.get());
    check(lobcal_trace_write_csv(trace.get(), (out / "best_trace.csv").string().c_str()), "writing trace");
    check(lobcal_features_write_csv(sim.get(), (out / "best_features.csv").string().c_str()), "writing features");
    lobcal_validation v;
    check(lobcal_validate(target.get(), sim.get(), &v), "validation");

    ordered_json run = run_header("calibrate", c);
    run["target"] = o.target;
    run["features"] = ids;
    run["objective"] = {{"metric", o.metric}, {"aggregation", o.agg}, {"normalization", o.norm},
                        {"replicates", o.replicates}};
    run["budget"] = o.budget;
    run["evaluations_used"] = lobcal_calibration_evaluations(cal.get());
    run["pso"] = {{"population", pso.population}, {"inertia", pso.inertia}, {"c1", pso.c1}, {"c2", pso.c2},
                  {"pso_seed", lobcal_derive_seed(c.seed, "pso", 0)}};
    lobcal_sim_config used;
    check(lobcal_calibration_sim_config(cal.get(), &used), "calibration");
    run["sim_config"] = sim_json(used);
    run["validation_sim_config"] = sim_json(vcfg);
    run["best_params"] = params_json(best);
    run["best_value"] = best_value;
    run["validation"] = validation_json(v);
    write_json(out / "validation.json", validation_json(v));
    write_json(out / "run.json", run);
    std::printf("%s\n", run.dump(2).c_str());
}

void cmd_evaluate(const Common& c, const EvaluateOpts& o) {
    FeaturesPtr target = read_features(o.target);
    FeaturesPtr sim = read_features(o.simulated);
    lobcal_validation v;
    check(lobcal_validate(target.get(), sim.get(), &v), "evaluate");
    ordered_json report = validation_json(v);
    report["target"] = o.target;
    report["simulated"] = o.simulated;
    write_json(fs::path(c.out) / "validation.json", report);
    print_validation(v);
}

void cmd_grid(const Common& c, const GridOpts& o) {
    const auto dims = split(o.dims, ',');
    if (dims.size() != 2) throw CliError("--dims expects two parameter names, e.g. alpha,mu");
    lobcal_grid_spec g;
    lobcal_grid_spec_default(&g);
    lobcal_search_space box;
    lobcal_search_space_default(&box);
    for (int a = 0; a < 2; ++a) {
        g.dims[a] = parse_dim(dims[static_cast<std::size_t>(a)]);
        g.lo[a] = box.lo[g.dims[a]];
        g.hi[a] = box.hi[g.dims[a]];
        g.resolution[a] = o.resolution;
    }
    if (g.dims[0] == g.dims[1]) throw CliError("--dims must name two different parameters");

    lobcal_sim_config cfg;
    lobcal_sim_config_default(&cfg);
    cfg.steps = o.steps;
    cfg.warmup_steps = o.warmup;

    ordered_json run = run_header("grid", c);
    FeaturesPtr target;
    if (!o.target.empty()) {
        target = read_features(o.target);
        run["target"] = o.target;
    } else {
        lobcal_sim_config tcfg = cfg;
        tcfg.seed = lobcal_derive_seed(c.seed, "target", 0);
        TracePtr t = simulate(g.base, tcfg);
        target = extract_all(t.get());
        run["target"] = {{"generated_from", params_json(g.base)}, {"sim_config", sim_json(tcfg)}};
    }
    cfg.seed = lobcal_derive_seed(c.seed, "simulation", 0);

    lobcal_grid* raw = nullptr;
    check(lobcal_grid_run(&g, target.get(), &cfg, o.q, o.threads, &raw), "grid");
    GridPtr grid(raw);
    const fs::path out(c.out);
    check(lobcal_grid_write(grid.get(), (out / "grid_cells.csv").string().c_str(),
                            (out / "grid_summary.csv").string().c_str(), (out / "grid_meta.json").string().c_str()),
          "writing grid");

    run["dims"] = {kParamNames[g.dims[0]], kParamNames[g.dims[1]]};
    run["ranges"] = {{g.lo[0], g.hi[0]}, {g.lo[1], g.hi[1]}};
    run["resolution"] = o.resolution;
    run["q"] = o.q;
    run["sim_config"] = sim_json(cfg);
    run["base_params"] = params_json(g.base);
    write_json(out / "run.json", run);

    std::printf("cells %zu\nK,P_K\n", lobcal_grid_cells(grid.get()));
    for (int k = 1; k <= LOBCAL_NUM_FEATURES; ++k) {
        double p = 0.0;
        std::int64_t card = 0;
        check(lobcal_grid_probability(grid.get(), k, &p, &card), "grid");
        std::printf("%d,%.6g\n", k, p);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate, calibrate and analyse limit-order-book agent models"};
    app.set_config("--config", "", "TOML/INI file with option values; flags on the command line win");
    app.require_subcommand(1);

    Common common;
    app.add_option("--seed", common.seed, "Master seed")->capture_default_str();
    app.add_option("--out", common.out, "Output directory")->capture_default_str();

    GenerateOpts gen;
    auto* g = app.add_subcommand("generate", "Simulate a trace and write trace, metadata and feature CSVs");
    g->add_option("--preset", gen.preset, "data1..data10");
    for (int i = 0; i < LOBCAL_NUM_PARAMS; ++i) {
        std::string flag = std::string("--") + kParamNames[i];
        for (char& ch : flag)
            if (ch == '_') ch = '-';
        g->add_option_function<double>(flag, [&gen, i](const double& v) { gen.overrides[static_cast<std::size_t>(i)] = v; },
                                       std::string("Override ") + kParamNames[i]);
    }
    g->add_option("--steps", gen.steps, "Recorded steps")->capture_default_str()->check(CLI::PositiveNumber);
    g->add_option("--warmup", gen.warmup, "Warm-up steps")->capture_default_str()->check(CLI::NonNegativeNumber);
    g->add_flag("--event-log", gen.event_log, "Also write every book event to events.csv");

    CalibrateOpts cal;
    auto* c = app.add_subcommand("calibrate", "Fit model parameters to a target with PSO");
    c->add_option("--target", cal.target, "Target feature or trace CSV")->required();
    c->add_option("--features", cal.features, "Comma-separated feature ids")->capture_default_str();
    c->add_option("--budget", cal.budget, "Simulation budget")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--replicates", cal.replicates, "Simulations per candidate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_option("--metric", cal.metric)->capture_default_str()->check(CLI::IsMember({"w", "mse"}));
    c->add_option("--agg", cal.agg)->capture_default_str()->check(CLI::IsMember({"max", "mean"}));
    c->add_option("--norm", cal.norm)->capture_default_str()->check(CLI::IsMember({"target", "joint", "none"}));
    c->add_option("--steps", cal.steps, "Simulated steps (default: target length)");
    c->add_option("--warmup", cal.warmup)->capture_default_str()->check(CLI::NonNegativeNumber);
    c->add_option("--population", cal.population)->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--threads", cal.threads, "0 = all cores")->capture_default_str();

    EvaluateOpts ev;
    auto* e = app.add_subcommand("evaluate", "Normalized W and MSE between two feature sets");
    e->add_option("--target", ev.target)->required();
    e->add_option("--simulated", ev.simulated)->required();

    GridOpts gr;
    auto* gd = app.add_subcommand("grid", "Top-q intersection analysis over a 2-D parameter grid");
    gd->add_option("--target", gr.target, "Target CSV (default: simulate the recommended setting)");
    gd->add_option("--resolution", gr.resolution, "Points per axis")->capture_default_str()->check(CLI::PositiveNumber);
    gd->add_option("--q", gr.q, "Top fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    gd->add_option("--dims", gr.dims, "Two parameter names")->capture_default_str();
    gd->add_option("--steps", gr.steps)->capture_default_str()->check(CLI::PositiveNumber);
    gd->add_option("--warmup", gr.warmup)->capture_default_str()->check(CLI::NonNegativeNumber);
    gd->add_option("--threads", gr.threads, "0 = all cores")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        std::error_code ec;
        fs::create_directories(common.out, ec);
        if (ec) throw CliError("cannot create output directory " + common.out + ": " + ec.message());
        if (*g) cmd_generate(common, gen);
        else if (*c) cmd_calibrate(common, cal);
        else if (*e) cmd_evaluate(common, ev);
        else if (*gd) cmd_grid(common, gr);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "lobcal: error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
