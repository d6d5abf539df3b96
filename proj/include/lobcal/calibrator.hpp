#ifndef LOBCAL_CALIBRATOR_HPP
#define LOBCAL_CALIBRATOR_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lobcal/discrepancy.hpp"
#include "lobcal/features.hpp"
#include "lobcal/pgps.hpp"

namespace lobcal::calib {

/// Axis-aligned box, one (lo, hi) pair per dimension.
struct SearchSpace {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const noexcept { return lo.size(); }
    bool contains(std::span<const double> x) const noexcept;
    void validate() const;

    /// Default box for [delta, lambda0, c_lambda, delta_s, alpha, mu].
    static SearchSpace pgps_default();
    static SearchSpace cube(std::size_t dim, double lo, double hi);
};

struct PsoSettings {
    int population = 40;
    double inertia = 0.8;
    double c1 = 0.5;  // cognitive
    double c2 = 0.5;  // social
    unsigned threads = 1;  // 0 = hardware concurrency
};

struct PsoResult {
    std::vector<double> best_position;
    double best_value = 0.0;
    std::vector<double> history;  // global best after each iteration
    std::int64_t evaluations_used = 0;
    std::int64_t iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Synchronous global-best PSO. iterations = floor(budget / population);
/// every iteration evaluates the whole swarm. Out-of-box positions are
/// clamped and the offending velocity component zeroed. Deterministic in
/// seed for a deterministic objective regardless of thread count.
PsoResult pso_minimize(const Objective& objective, const SearchSpace& space, std::int64_t budget,
                       std::uint64_t seed, const PsoSettings& settings = {});

struct CalibrationResult {
    pgps::PgpsParams best_params;
    double best_value = 0.0;
    std::vector<double> history;
    std::int64_t evaluations_used = 0;
    std::int64_t budget = 0;
    std::uint64_t seed = 0;
    std::uint64_t simulation_seed = 0;  // shared by every candidate
    std::uint64_t pso_seed = 0;
    discrepancy::ObjectiveSpec spec;
    SearchSpace space;
    pgps::SimConfig sim_config;
    PsoSettings settings;
};

/// Minimizes the objective against `target`. Every candidate is simulated
/// with the same seed (common random numbers), derived from `seed`;
/// base.seed is overwritten.
CalibrationResult calibrate(const features::FeatureMatrix& target, const discrepancy::ObjectiveSpec& spec,
                            const SearchSpace& space, std::int64_t budget, std::uint64_t seed,
                            const pgps::SimConfig& base = {}, const PsoSettings& settings = {});

}  // namespace lobcal::calib

#endif  // LOBCAL_CALIBRATOR_HPP
