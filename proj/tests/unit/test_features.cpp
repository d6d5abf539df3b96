#include <doctest.h>

#include <cmath>

#include "lobcal/error.hpp"
#include "lobcal/features.hpp"

using namespace lobcal;
using namespace lobcal::features;
using pgps::TraceRecord;

namespace {

std::vector<TraceRecord> records() {
    return {{100, 102, 3, 5, 1}, {101, 104, 0, 2, 2}, {99, 100, 7, 1, 9}};
}

}  // namespace

TEST_CASE("hand-computed features") {
    const auto rec = records();
    const auto m = extract(std::span<const TraceRecord>(rec), all_feature_ids());
    CHECK(m.at(1).values == std::vector<double>{101.0, 102.5, 99.5});
    CHECK(m.at(2).values == std::vector<double>{3, 0, 7});
    REQUIRE(m.at(3).length() == 2);
    CHECK(m.at(3).values[0] == doctest::Approx(std::log(102.5 / 101.0)));
    CHECK(m.at(3).values[1] == doctest::Approx(std::log(99.5 / 102.5)));
    CHECK(m.at(4).values == std::vector<double>{2, 3, 1});
    CHECK(m.at(5).values == std::vector<double>{5, 2, 1});
    CHECK(m.at(6).values == std::vector<double>{1, 2, 9});
    CHECK(m.steps() == 3);
    CHECK(m.source() == Source::Simulated);
}

TEST_CASE("constant mid gives zero returns") {
    std::vector<TraceRecord> rec(10, TraceRecord{99, 101, 0, 1, 1});
    const int ids[] = {3};
    const auto m = extract(std::span<const TraceRecord>(rec), ids);
    CHECK(m.at(3).length() == 9);
    for (double v : m.at(3).values) CHECK(v == 0.0);
}

TEST_CASE("f3 needs two steps") {
    std::vector<TraceRecord> rec(1, TraceRecord{99, 101, 0, 1, 1});
    const int f3[] = {3};
    const int f1[] = {1};
    CHECK_THROWS_AS(extract(std::span<const TraceRecord>(rec), f3), ConfigError);
    CHECK(extract(std::span<const TraceRecord>(rec), f1).at(1).length() == 1);
}

TEST_CASE("feature id validation") {
    CHECK_THROWS_AS(validate_feature_ids(std::vector<int>{}), ConfigError);
    CHECK_THROWS_AS(validate_feature_ids(std::vector<int>{0}), ConfigError);
    CHECK_THROWS_AS(validate_feature_ids(std::vector<int>{7}), ConfigError);
    CHECK_THROWS_AS(validate_feature_ids(std::vector<int>{2, 2}), ConfigError);
    CHECK_NOTHROW(validate_feature_ids(std::vector<int>{6, 1}));
}

TEST_CASE("feature list parsing") {
    CHECK(parse_feature_list("1,2,3") == std::vector<int>{1, 2, 3});
    CHECK(parse_feature_list(" f4 , 6") == std::vector<int>{4, 6});
    CHECK_THROWS_AS(parse_feature_list("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_feature_list("1,x"), ConfigError);
    CHECK_THROWS_AS(parse_feature_list("1,9"), ConfigError);
}

TEST_CASE("missing features are listed together") {
    const auto rec = records();
    const int ids[] = {1, 2};
    const auto m = extract(std::span<const TraceRecord>(rec), ids);
    try {
        m.require(std::vector<int>{1, 4, 6});
        FAIL("expected MissingFeatureError");
    } catch (const MissingFeatureError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("f4") != std::string::npos);
        CHECK(msg.find("f6") != std::string::npos);
        CHECK(msg.find("f1") == std::string::npos);
    }
    CHECK_THROWS_AS(m.at(5), MissingFeatureError);
}

TEST_CASE("extraction from a simulated trace") {
    pgps::SimConfig c;
    c.steps = 200;
    c.warmup_steps = 50;
    const auto t = pgps::run_simulation(pgps::PgpsParams{}, c);
    const auto m = extract(t, all_feature_ids());
    for (int id : {1, 2, 4, 5, 6}) CHECK(m.at(id).length() == 200);
    CHECK(m.at(3).length() == 199);
    for (double s : m.at(4).values) CHECK(s >= 1.0);
}
