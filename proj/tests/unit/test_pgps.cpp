#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lobcal/error.hpp"
#include "lobcal/pgps.hpp"

using namespace lobcal;
using namespace lobcal::pgps;

namespace {

SimConfig short_config(std::int64_t steps = 500, std::uint64_t seed = 5) {
    SimConfig c;
    c.steps = steps;
    c.warmup_steps = 100;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("presets carry the documented rows") {
    CHECK(preset("data1")->to_array() == std::array<double, 6>{0.025, 100, 10, 0.001, 0.15, 0.025});
    CHECK(preset("data7")->to_array() == std::array<double, 6>{0.033, 114, 14, 0.0033, 0.1, 0.047});
    CHECK(preset("data9")->to_array() == std::array<double, 6>{0.02, 62, 2, 0.003, 0.14, 0.02});
    CHECK(preset("data10")->to_array() == std::array<double, 6>{0.01, 87, 23, 0.001, 0.09, 0.05});
    CHECK_FALSE(preset("data0"));
    CHECK_FALSE(preset("data11"));
    CHECK_FALSE(preset("data01"));
    CHECK_FALSE(preset("foo"));
    CHECK(preset_names().size() == 10);
    for (const auto& n : preset_names()) CHECK_NOTHROW(preset(n)->validate());
}

TEST_CASE("parameter validation names the field") {
    PgpsParams p;
    p.alpha = 1.5;
    try {
        p.validate();
        FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
    p = {};
    p.delta_s = 0.5;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.lambda0 = 0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    CHECK_THROWS_AS(PgpsParams::from_array(std::vector<double>{1, 2}), ParameterError);
}

TEST_CASE("config validation") {
    PgpsParams p;
    SimConfig c;
    c.steps = 0;
    CHECK_THROWS_AS(c.validate(p), ConfigError);
    c = {};
    c.warmup_steps = -1;
    CHECK_THROWS_AS(c.validate(p), ConfigError);
    c = {};
    c.p0 = 2000;  // 20 * lambda0 = 2000, must be strictly above
    CHECK_THROWS_AS(c.validate(p), ConfigError);
}

TEST_CASE("sigma_q is positive, bounded, deterministic and grows with the step") {
    const double a = precompute_sigma_q(0.001);
    const double b = precompute_sigma_q(0.01);
    CHECK(a > 0.0);
    CHECK(a < 0.5);
    CHECK(a == precompute_sigma_q(0.001));
    CHECK(a < b);
}

TEST_CASE("sigma_q is close to the diffusion estimate") {
    // Drift -2 (q - 1/2) ds per step with step size ds gives variance ds / 4.
    for (double ds : {0.002, 0.01}) {
        const double s = precompute_sigma_q(ds);
        CHECK(s == doctest::Approx(std::sqrt(ds / 4.0)).epsilon(0.25));
    }
}

TEST_CASE("q walk step rules") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const double n = step_q_taker(0.5, 0.003, rng);
        CHECK((n == doctest::Approx(0.497) || n == doctest::Approx(0.503)));
    }
    for (int i = 0; i < 100; ++i) CHECK(step_q_taker(1.0, 0.002, rng) == doctest::Approx(0.998));
    for (int i = 0; i < 100; ++i) CHECK(step_q_taker(0.0, 0.002, rng) == doctest::Approx(0.002));
}

TEST_CASE("q stays in [0,1] and averages one half") {
    Rng rng(77);
    const double ds = 0.01;
    const int batches = 50, len = 2000;
    std::vector<double> means;
    double q = 0.5;
    for (int b = 0; b < batches; ++b) {
        double acc = 0.0;
        for (int i = 0; i < len; ++i) {
            q = step_q_taker(q, ds, rng);
            REQUIRE(q >= 0.0);
            REQUIRE(q <= 1.0);
            acc += q;
        }
        means.push_back(acc / len);
    }
    const double m = std::accumulate(means.begin(), means.end(), 0.0) / batches;
    double var = 0.0;
    for (double x : means) var += (x - m) * (x - m);
    const double se = std::sqrt(var / (batches - 1) / batches);
    CHECK(std::abs(m - 0.5) < 3 * se);
}

TEST_CASE("lambda_t") {
    CHECK(lambda_t(0.5, 0.05, 100, 10) == 100.0);
    CHECK(lambda_t(0.9, 0.05, 100, 0) == 100.0);
    CHECK(lambda_t(0.6, 0.05, 100, 10) == doctest::Approx(2100.0).epsilon(1e-12));
    CHECK(lambda_t(0.4, 0.05, 100, 10) == doctest::Approx(2100.0).epsilon(1e-12));
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) CHECK(lambda_t(rng.uniform(), 0.02, 50, rng.uniform() * 10) >= 50.0);
}

TEST_CASE("provider prices sit behind the opposite best") {
    market::OrderBook book(10000);
    book.submit_limit({1, market::Side::Bid, market::OrderKind::Limit, 9999, 1, {}});
    book.submit_limit({2, market::Side::Ask, market::OrderKind::Limit, 10001, 1, {}});
    const double u1 = std::nextafter(1.0, 0.0);
    CHECK(provider_order_price(book, market::Side::Ask, 100, u1) == 10000);
    CHECK(provider_order_price(book, market::Side::Bid, 100, u1) == 10000);
    CHECK(provider_order_price(book, market::Side::Bid, 1e9, 1e-300) == 1);

    Rng rng(21);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        acc += static_cast<double>(provider_order_price(book, market::Side::Ask, 100, rng) - 9999 - 1);
    CHECK(acc / n == doctest::Approx(100.0).epsilon(0.02));
}

TEST_CASE("no agents acting gives a flat trace") {
    PgpsParams p;
    p.alpha = 0;
    p.mu = 0;
    const auto t = run_simulation(p, short_config(300));
    REQUIRE(t.size() == 300);
    for (const auto& r : t.records) {
        CHECK(r.traded_volume == 0);
        CHECK(r.best_bid == 9999);
        CHECK(r.best_ask == 10001);
    }
}

TEST_CASE("data1 trace is nondegenerate and well formed") {
    auto c = short_config(3600);
    c.warmup_steps = 200;
    const auto t = run_simulation(*preset("data1"), c);
    REQUIRE(t.size() == 3600);
    bool traded = false, moved = false;
    for (const auto& r : t.records) {
        REQUIRE(r.best_bid < r.best_ask);
        REQUIRE(r.traded_volume >= 0);
        REQUIRE(r.best_bid_volume >= 0);
        REQUIRE(r.best_ask_volume >= 0);
        traded |= r.traded_volume > 0;
        moved |= (r.best_bid + r.best_ask) != (t.records[0].best_bid + t.records[0].best_ask);
    }
    CHECK(traded);
    CHECK(moved);
}

TEST_CASE("determinism and seed sensitivity") {
    const auto p = *preset("data7");
    const auto a = run_simulation(p, short_config(400, 9));
    const auto b = run_simulation(p, short_config(400, 9));
    CHECK(a.records == b.records);
    CHECK(a.config_hash() == b.config_hash());
    const auto c = run_simulation(p, short_config(400, 10));
    CHECK(a.records != c.records);
    auto rep = short_config(400, 9);
    rep.replicate_index = 1;
    CHECK(run_simulation(p, rep).records != a.records);
}

TEST_CASE("provider submissions follow Binomial(125, alpha) per step") {
    PgpsParams p;
    p.alpha = 0.1;
    auto c = short_config(2000);
    std::int64_t limits = 0;
    run_simulation(p, c, [&](const Event& e) {
        if (e.kind == EventKind::Limit) ++limits;
    });
    const double n = 125.0 * static_cast<double>(c.steps + c.warmup_steps);
    const double mean = n * p.alpha;
    const double sd = std::sqrt(n * p.alpha * (1 - p.alpha));
    CHECK(std::abs(static_cast<double>(limits) - mean) < 3 * sd);
}

TEST_CASE("event log is consistent with the trace") {
    const auto p = *preset("data1");
    std::int64_t trades = 0;
    const auto t = run_simulation(p, short_config(300), [&](const Event& e) {
        if (e.kind == EventKind::Trade && e.step >= 0) trades += e.volume;
        if (e.kind == EventKind::Cancel) CHECK(e.volume > 0);
    });
    std::int64_t recorded = 0;
    for (const auto& r : t.records) recorded += r.traded_volume;
    CHECK(trades == recorded);
}

TEST_CASE("delta = 1 clears the book every step") {
    PgpsParams p;
    p.delta = 1.0;
    p.mu = 0.0;
    const auto t = run_simulation(p, short_config(50));
    for (const auto& r : t.records) {
        CHECK(r.best_bid_volume == 0);
        CHECK(r.best_ask_volume == 0);
    }
}
