#include <algorithm>

#include "lobcal/calibrator.hpp"
#include "lobcal/error.hpp"
#include "lobcal/rng.hpp"

namespace lobcal::calib {

CalibrationResult calibrate(const features::FeatureMatrix& target, const discrepancy::ObjectiveSpec& spec,
                            const SearchSpace& space, std::int64_t budget, std::uint64_t seed,
                            const pgps::SimConfig& base, const PsoSettings& settings) {
    if (space.dim() != pgps::PgpsParams::kDim) throw ConfigError("calibration search space must be 6-dimensional");
    space.validate();
    if (budget < settings.population)
        throw ConfigError("budget " + std::to_string(budget) + " is smaller than the population size " +
                          std::to_string(settings.population));

    CalibrationResult out;
    out.spec = spec;
    out.space = space;
    out.budget = budget;
    out.seed = seed;
    out.settings = settings;
    out.simulation_seed = derive_seed(seed, "simulation");
    out.pso_seed = derive_seed(seed, "pso");
    out.sim_config = base;
    out.sim_config.seed = out.simulation_seed;

    const discrepancy::PreparedObjective objective(spec, target);
    // Validate the config against the largest lambda0 in the box up front so a
    // bad p0 fails before any simulation work.
    pgps::PgpsParams probe = pgps::PgpsParams::from_array(space.hi);
    probe.delta_s = std::min(probe.delta_s, 0.49);
    out.sim_config.validate(probe);

    const pgps::SimConfig cfg = out.sim_config;
    auto fn = [&](std::span<const double> x) {
        return objective.evaluate(pgps::PgpsParams::from_array(x), cfg).aggregate;
    };
    const PsoResult r = pso_minimize(fn, space, budget, out.pso_seed, settings);

    out.best_params = pgps::PgpsParams::from_array(r.best_position);
    out.best_value = r.best_value;
    out.history = r.history;
    out.evaluations_used = r.evaluations_used;
    return out;
}

}  // namespace lobcal::calib
