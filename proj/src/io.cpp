#include "lobcal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "lobcal/error.hpp"

namespace lobcal::io {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
    return std::string(buf, end);
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << source << ":" << line << ": " << what;
    throw ParseError(os.str());
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    // Trailing blank lines are not records.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t c = line.find(',', pos);
        std::string_view f = line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos);
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
        out.push_back(f);
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trace_csv(const pgps::SimTrace& trace) {
    std::string out(kTraceHeader);
    out += '\n';
    for (std::size_t t = 0; t < trace.records.size(); ++t) {
        const auto& r = trace.records[t];
        out += std::to_string(t) + ',' + std::to_string(r.best_bid) + ',' + std::to_string(r.best_ask) + ',' +
               std::to_string(r.traded_volume) + ',' + std::to_string(r.best_bid_volume) + ',' +
               std::to_string(r.best_ask_volume) + '\n';
    }
    return out;
}

pgps::SimTrace parse_trace_csv(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != kTraceHeader)
        parse_fail(source, 1, "expected header '" + std::string(kTraceHeader) + "'");
    pgps::SimTrace trace;
    std::int64_t prev_t = 0;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto f = split_fields(lines[ln]);
        if (f.size() != 6) parse_fail(source, ln + 1, "expected 6 fields, got " + std::to_string(f.size()));
        std::int64_t v[6];
        for (int k = 0; k < 6; ++k)
            if (!parse_number(f[static_cast<std::size_t>(k)], v[k]))
                parse_fail(source, ln + 1, "field " + std::to_string(k + 1) + " is not an integer");
        if (ln > 1 && v[0] <= prev_t) parse_fail(source, ln + 1, "t is not strictly increasing");
        if (v[3] < 0 || v[4] < 0 || v[5] < 0) parse_fail(source, ln + 1, "negative volume");
        if (v[1] >= v[2]) parse_fail(source, ln + 1, "best_bid must be below best_ask");
        prev_t = v[0];
        trace.records.push_back({v[1], v[2], v[3], v[4], v[5]});
    }
    trace.config.steps = static_cast<std::int64_t>(trace.records.size());
    return trace;
}

json trace_metadata(const pgps::SimTrace& trace) {
    return json{{"format", "lobcal.trace/1"},
                {"params", to_json(trace.params)},
                {"config", to_json(trace.config)},
                {"sigma_q", trace.sigma_q},
                {"records", trace.records.size()},
                {"config_hash", hex64(trace.config_hash())}};
}

std::string features_csv(const features::FeatureMatrix& m) {
    const auto ids = m.ids();
    std::string out = "t";
    for (int id : ids) out += ",f" + std::to_string(id);
    out += '\n';
    const std::size_t rows = m.steps();
    for (std::size_t t = 0; t < rows; ++t) {
        out += std::to_string(t);
        for (int id : ids) {
            out += ',';
            const auto& v = m.at(id).values;
            if (t < v.size()) out += format_double(v[t]);
        }
        out += '\n';
    }
    return out;
}

features::FeatureMatrix parse_features_csv(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty()) parse_fail(source, 1, "empty file");
    const auto header = split_fields(lines.front());
    if (header.empty() || header.front() != "t") parse_fail(source, 1, "first column must be 't'");
    std::vector<int> ids;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string_view h = header[c];
        int id = 0;
        if (h.size() < 2 || h.front() != 'f' || !parse_number(h.substr(1), id) || id < 1 || id > 6)
            parse_fail(source, 1, "unknown column '" + std::string(h) + "'");
        for (int seen : ids)
            if (seen == id) parse_fail(source, 1, "duplicate column '" + std::string(h) + "'");
        ids.push_back(id);
    }
    if (ids.empty()) parse_fail(source, 1, "no feature columns");

    std::vector<std::vector<double>> cols(ids.size());
    double prev_t = 0.0;
    const std::size_t rows = lines.size() - 1;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const std::size_t line_no = ln + 1;
        const auto f = split_fields(lines[ln]);
        if (f.size() != header.size())
            parse_fail(source, line_no,
                       "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        double t = 0.0;
        if (!parse_number(f[0], t) || !std::isfinite(t)) parse_fail(source, line_no, "bad timestamp");
        if (ln > 1 && !(t > prev_t)) parse_fail(source, line_no, "timestamps are not strictly increasing");
        prev_t = t;
        for (std::size_t c = 0; c < ids.size(); ++c) {
            const std::string_view cell = f[c + 1];
            const int id = ids[c];
            if (cell.empty()) {
                if (id == 3 && ln == rows) continue;  // return undefined at the last step
                parse_fail(source, line_no, "blank value for f" + std::to_string(id));
            }
            double v = 0.0;
            if (!parse_number(cell, v) || !std::isfinite(v))
                parse_fail(source, line_no, "bad number '" + std::string(cell) + "' for f" + std::to_string(id));
            if ((id == 2 || id == 5 || id == 6) && v < 0.0)
                parse_fail(source, line_no, "negative volume in f" + std::to_string(id));
            cols[c].push_back(v);
        }
    }
    if (rows == 0) parse_fail(source, 2, "no data rows");

    features::FeatureMatrix m(features::Source::Observed);
    for (std::size_t c = 0; c < ids.size(); ++c) m.insert({ids[c], std::move(cols[c])});
    return m;
}

features::FeatureMatrix ingest_real_data(const std::filesystem::path& path) {
    return parse_features_csv(read_file(path), path.string());
}

features::FeatureMatrix read_feature_source(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    if (std::string_view(text).starts_with(kTraceHeader)) {
        const auto trace = parse_trace_csv(text, path.string());
        const auto ids = features::all_feature_ids();
        return features::extract(trace, ids);
    }
    return parse_features_csv(text, path.string());
}

json to_json(const pgps::PgpsParams& p) {
    json j;
    const auto v = p.to_array();
    for (std::size_t i = 0; i < v.size(); ++i) j[std::string(pgps::PgpsParams::kNames[i])] = v[i];
    j["vector"] = v;
    return j;
}

json to_json(const pgps::SimConfig& c) {
    return json{{"n_providers", c.n_providers}, {"n_takers", c.n_takers}, {"steps", c.steps},
                {"warmup_steps", c.warmup_steps}, {"p0", c.p0},           {"seed", c.seed},
                {"replicate_index", c.replicate_index}};
}

json to_json(const discrepancy::ObjectiveSpec& s) {
    return json{{"feature_ids", s.feature_ids},
                {"metric", discrepancy::to_string(s.metric)},
                {"aggregation", discrepancy::to_string(s.aggregation)},
                {"normalization", discrepancy::to_string(s.normalization)},
                {"replicates", s.replicates}};
}

json to_json(const discrepancy::DiscrepancyReport& r) {
    json bounds = json::array();
    for (const auto& b : r.bounds) bounds.push_back({b.lo, b.hi});
    return json{{"feature_ids", r.feature_ids},
                {"values", r.values},
                {"aggregate", r.aggregate},
                {"aggregation", discrepancy::to_string(r.aggregation)},
                {"normalization_bounds", bounds}};
}

json to_json(const calib::CalibrationResult& r) {
    return json{{"format", "lobcal.calibration/1"},
                {"best_params", to_json(r.best_params)},
                {"best_value", r.best_value},
                {"history", r.history},
                {"evaluations_used", r.evaluations_used},
                {"budget", r.budget},
                {"seed", r.seed},
                {"simulation_seed", r.simulation_seed},
                {"pso_seed", r.pso_seed},
                {"objective", to_json(r.spec)},
                {"search_space", {{"lo", r.space.lo}, {"hi", r.space.hi}}},
                {"sim_config", to_json(r.sim_config)},
                {"pso",
                 {{"population", r.settings.population},
                  {"inertia", r.settings.inertia},
                  {"c1", r.settings.c1},
                  {"c2", r.settings.c2}}}};
}

json to_json(const validation::ValidationReport& r) {
    json bounds = json::array();
    for (const auto& b : r.bounds) bounds.push_back({b.lo, b.hi});
    return json{{"feature_ids", r.feature_ids},     {"wasserstein", r.wasserstein},
                {"mse", r.mse},                     {"mean_wasserstein", r.mean_wasserstein},
                {"mean_mse", r.mean_mse},           {"normalization_bounds", bounds}};
}

std::string calibration_history_csv(const calib::CalibrationResult& r) {
    std::string out = "iteration,best_value\n";
    for (std::size_t i = 0; i < r.history.size(); ++i)
        out += std::to_string(i) + ',' + format_double(r.history[i]) + '\n';
    return out;
}

std::string grid_csv(const ident::GridReport& report, const ident::TopQSets& sets,
                     const ident::IntersectionStats& stats) {
    const auto& names = pgps::PgpsParams::kNames;
    std::string out = std::string(names[static_cast<std::size_t>(report.spec.dims[0])]) + ',' +
                      std::string(names[static_cast<std::size_t>(report.spec.dims[1])]);
    for (int k = 1; k <= 6; ++k) out += ",D" + std::to_string(k);
    for (std::size_t k = 1; k <= sets.masks.size(); ++k) out += ",in_S" + std::to_string(k);
    for (std::size_t k = 1; k <= stats.intersections.size(); ++k) out += ",in_cap_K" + std::to_string(k);
    out += '\n';
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        const auto& cell = report.cells[c];
        out += format_double(cell.coords[0]) + ',' + format_double(cell.coords[1]);
        for (double d : cell.d) out += ',' + format_double(d);
        for (const auto& m : sets.masks) out += m[c] ? ",1" : ",0";
        for (const auto& m : stats.intersections) out += m[c] ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

std::string grid_summary_csv(const ident::IntersectionStats& stats) {
    std::string out = "K,cardinality,P_K,beta_K,chain_product,upper_bound,chain_identity_exact,upper_bound_exact\n";
    for (const auto& e : stats.estimates) {
        out += std::to_string(e.k) + ',' + std::to_string(e.cardinality) + ',' + format_double(e.probability) + ',';
        if (e.k >= 2) out += format_double(stats.beta[static_cast<std::size_t>(e.k - 2)].value());
        out += ',' + format_double(stats.chain_product(e.k)) + ',' + format_double(stats.upper_bound(e.k));
        out += stats.chain_identity_holds(e.k) ? ",1" : ",0";
        out += stats.upper_bound_holds(e.k) ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

json grid_metadata(const ident::GridReport& report, double q) {
    const auto& s = report.spec;
    const auto& names = pgps::PgpsParams::kNames;
    return json{{"format", "lobcal.grid/1"},
                {"dims",
                 {std::string(names[static_cast<std::size_t>(s.dims[0])]),
                  std::string(names[static_cast<std::size_t>(s.dims[1])])}},
                {"ranges", {{s.ranges[0].lo, s.ranges[0].hi}, {s.ranges[1].lo, s.ranges[1].hi}}},
                {"resolution", s.resolution},
                {"base_params", to_json(s.base)},
                {"sim_config", to_json(report.sim_config)},
                {"replicates", report.replicates},
                {"cells", report.cells.size()},
                {"simulations", report.simulations},
                {"q", q}};
}

std::string event_log_header() { return "step,event,side,price,volume,order_id\n"; }

std::string event_log_row(const pgps::Event& e) {
    std::string out = std::to_string(e.step) + ',' + std::string(pgps::to_string(e.kind)) + ',' +
                      (e.side == market::Side::Bid ? "bid" : "ask") + ',';
    if (e.kind != pgps::EventKind::Market && e.kind != pgps::EventKind::Discard) out += std::to_string(e.price);
    out += ',' + std::to_string(e.volume) + ',' + std::to_string(e.order_id) + '\n';
    return out;
}

}  // namespace lobcal::io
