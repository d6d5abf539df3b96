#include <doctest.h>

#include <cmath>

#include "lobcal/parallel.hpp"
#include "lobcal/rng.hpp"

using lobcal::Rng;

TEST_CASE("derived seeds separate namespaces and indices") {
    CHECK(lobcal::derive_seed(1, "simulation") != lobcal::derive_seed(1, "pso"));
    CHECK(lobcal::derive_seed(1, "simulation", 0) != lobcal::derive_seed(1, "simulation", 1));
    CHECK(lobcal::derive_seed(1, "simulation") != lobcal::derive_seed(2, "simulation"));
    CHECK(lobcal::derive_seed(7, "x", 3) == lobcal::derive_seed(7, "x", 3));
}

TEST_CASE("uniform ranges") {
    Rng r(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        const double o = r.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(o > 0.0);
        REQUIRE(o < 1.0);
    }
}

TEST_CASE("below is unbiased enough") {
    Rng r(9);
    std::array<int, 7> counts{};
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[r.below(7)];
    for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}

TEST_CASE("geometric gap has mean (1-p)/p") {
    Rng r(11);
    const double p = 0.05;
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(r.geometric_gap(p));
    const double mean = (1 - p) / p;
    const double sd = std::sqrt(1 - p) / p / std::sqrt(n);
    CHECK(std::abs(sum / n - mean) < 5 * sd);
}

TEST_CASE("parallel_for fills every slot and rethrows the lowest failing index") {
    std::vector<int> out(1000, 0);
    lobcal::parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);

    try {
        lobcal::parallel_for(100, 4, [](std::size_t i) {
            if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
    }
}
