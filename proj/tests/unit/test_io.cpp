#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lobcal/error.hpp"
#include "lobcal/io.hpp"

using namespace lobcal;
namespace fs = std::filesystem;

namespace {

pgps::SimTrace small_trace(std::int64_t steps = 120) {
    pgps::SimConfig c;
    c.steps = steps;
    c.warmup_steps = 50;
    c.seed = 6;
    return pgps::run_simulation(*pgps::preset("data3"), c);
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "lobcal_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string parse_error(std::string_view text) {
    try {
        io::parse_features_csv(text, "x.csv");
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 12345678.9})
        CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("trace CSV round trip") {
    const auto t = small_trace();
    const std::string csv = io::trace_csv(t);
    CHECK(csv.rfind(std::string(io::kTraceHeader) + "\n", 0) == 0);
    const auto back = io::parse_trace_csv(csv);
    CHECK(back.records == t.records);
    CHECK(io::trace_csv(back) == csv);
}

TEST_CASE("trace CSV rejects bad rows with line numbers") {
    const std::string h = std::string(io::kTraceHeader) + "\n";
    CHECK_THROWS_WITH_AS(io::parse_trace_csv(h + "0,10,12,1,1,1\n0,10,12,1,1,1\n", "a"), "a:3: t is not strictly increasing",
                         ParseError);
    CHECK_THROWS_WITH_AS(io::parse_trace_csv(h + "0,12,12,1,1,1\n", "a"), "a:2: best_bid must be below best_ask",
                         ParseError);
    CHECK_THROWS_WITH_AS(io::parse_trace_csv(h + "0,10,12,-1,1,1\n", "a"), "a:2: negative volume", ParseError);
    CHECK_THROWS_AS(io::parse_trace_csv("t,x\n"), ParseError);
    CHECK_THROWS_AS(io::parse_trace_csv(h + "0,10,12,1.5,1,1\n"), ParseError);
}

TEST_CASE("feature CSV round trip keeps every value bit-exact") {
    const auto m = features::extract(small_trace(), features::all_feature_ids());
    const std::string csv = io::features_csv(m);
    auto back = io::parse_features_csv(csv);
    CHECK(back.source() == features::Source::Observed);
    back.set_source(features::Source::Simulated);
    CHECK(back == m);
    // Last row has a blank f3.
    const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    CHECK(last.find(",,") != std::string::npos);
}

TEST_CASE("feature ingestion errors") {
    CHECK(parse_error("t,f1,f2\n0,1,2\n1,1,-2\n") == "x.csv:3: negative volume in f2");
    CHECK(parse_error("t,f1\n0,1\n0,2\n") == "x.csv:3: timestamps are not strictly increasing");
    CHECK(parse_error("t,f1\n1,1\n0,2\n") == "x.csv:3: timestamps are not strictly increasing");
    CHECK(parse_error("t,f1,f9\n0,1,2\n") == "x.csv:1: unknown column 'f9'");
    CHECK(parse_error("t,f1,f1\n0,1,2\n") == "x.csv:1: duplicate column 'f1'");
    CHECK(parse_error("t,f1\n0,abc\n") == "x.csv:2: bad number 'abc' for f1");
    CHECK(parse_error("t,f1\n0,\n1,2\n") == "x.csv:2: blank value for f1");
    CHECK(parse_error("t,f3\n0,\n1,2\n") == "x.csv:2: blank value for f3");
    CHECK(parse_error("t,f1\n") == "x.csv:2: no data rows");
    CHECK(parse_error("t,f1\n0,1,2\n").find("expected 2 fields") != std::string::npos);
    CHECK(parse_error("t,f1,f5\n0,1.5,3\n1,2,0\n").empty());
}

TEST_CASE("ingested subset reports missing features at use") {
    const auto m = io::parse_features_csv("t,f1,f2\n0,1,2\n1,1,2\n");
    CHECK(m.ids() == std::vector<int>{1, 2});
    CHECK_THROWS_WITH_AS(m.require(std::vector<int>{1, 4}), "missing features: f4", MissingFeatureError);
}

TEST_CASE("1200-row observed file") {
    std::string csv = "t,f1,f2,f3,f4,f5,f6\n";
    for (int t = 0; t < 1200; ++t)
        csv += std::to_string(t * 3) + ",100.5,2," + (t == 1199 ? std::string() : "0.001") + ",1,3,4\n";
    const auto path = scratch("observed.csv");
    io::write_atomic(path, csv);
    const auto m = io::ingest_real_data(path);
    CHECK(m.at(1).length() == 1200);
    CHECK(m.at(3).length() == 1199);
}

TEST_CASE("read_feature_source accepts traces and feature files") {
    const auto t = small_trace();
    const auto tp = scratch("trace.csv");
    io::write_atomic(tp, io::trace_csv(t));
    const auto fromtrace = io::read_feature_source(tp);
    CHECK(fromtrace.ids() == features::all_feature_ids());
    CHECK(fromtrace.at(1).values == features::extract(t, features::all_feature_ids()).at(1).values);

    const auto fp = scratch("features.csv");
    io::write_atomic(fp, io::features_csv(fromtrace));
    CHECK(io::read_feature_source(fp).at(4).values == fromtrace.at(4).values);
    CHECK_THROWS_AS(io::read_feature_source(scratch("missing.csv")), IoError);
}

TEST_CASE("atomic write replaces content and creates directories") {
    const auto p = scratch("nested/dir/out.txt");
    io::write_atomic(p, "one");
    io::write_atomic(p, "two");
    CHECK(io::read_file(p) == "two");
    for (const auto& e : fs::directory_iterator(p.parent_path())) CHECK(e.path().filename() == "out.txt");
}

TEST_CASE("metadata echoes params, config and hash") {
    const auto t = small_trace();
    const auto j = io::trace_metadata(t);
    CHECK(j["params"]["lambda0"] == 152.0);
    CHECK(j["config"]["seed"] == 6);
    CHECK(j["records"] == 120);
    CHECK(j["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("grid outputs") {
    ident::GridReport r;
    r.spec.resolution = {2, 2};
    r.cells.resize(4);
    for (std::size_t c = 0; c < 4; ++c) {
        r.cells[c].coords = {r.spec.coordinate(0, static_cast<int>(c / 2)), r.spec.coordinate(1, static_cast<int>(c % 2))};
        for (std::size_t k = 0; k < 6; ++k) r.cells[c].d[k] = static_cast<double>((c + k) % 4);
    }
    const auto sets = ident::topq_sets(r, 0.25);
    const auto stats = ident::intersection_stats(sets.masks, 6);
    const std::string cells = io::grid_csv(r, sets, stats);
    CHECK(cells.rfind("alpha,mu,D1,D2,D3,D4,D5,D6,in_S1,", 0) == 0);
    CHECK(std::count(cells.begin(), cells.end(), '\n') == 5);
    const std::string summary = io::grid_summary_csv(stats);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 7);
    CHECK(summary.find("\n1,1,0.25,,") != std::string::npos);
    CHECK(summary.find("\n6,") != std::string::npos);
}

TEST_CASE("event log rows") {
    CHECK(io::event_log_row({3, pgps::EventKind::Limit, market::Side::Ask, 10010, 1, 42}) ==
          "3,limit,ask,10010,1,42\n");
    CHECK(io::event_log_row({-1, pgps::EventKind::Market, market::Side::Bid, 0, 1, 7}) == "-1,market,bid,,1,7\n");
}
