#include <algorithm>
#include <cmath>
#include <sstream>

#include "lobcal/calibrator.hpp"
#include "lobcal/error.hpp"
#include "lobcal/parallel.hpp"
#include "lobcal/rng.hpp"

namespace lobcal::calib {

bool SearchSpace::contains(std::span<const double> x) const noexcept {
    if (x.size() != dim()) return false;
    for (std::size_t d = 0; d < dim(); ++d)
        if (!(x[d] >= lo[d] && x[d] <= hi[d])) return false;
    return true;
}

void SearchSpace::validate() const {
    if (lo.empty() || lo.size() != hi.size()) throw ConfigError("search space bounds are malformed");
    for (std::size_t d = 0; d < dim(); ++d) {
        if (!(lo[d] < hi[d]) || !std::isfinite(lo[d]) || !std::isfinite(hi[d])) {
            std::ostringstream os;
            os << "search space dimension " << d << " needs lo < hi, got [" << lo[d] << ", " << hi[d] << "]";
            throw ConfigError(os.str());
        }
    }
}

SearchSpace SearchSpace::pgps_default() {
    return {{0.001, 50.0, 1.0, 0.0005, 0.05, 0.01}, {0.1, 300.0, 50.0, 0.005, 0.2, 0.06}};
}

SearchSpace SearchSpace::cube(std::size_t dim, double lo, double hi) {
    return {std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

namespace {

struct Particle {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> best_x;
    double best = 0.0;
};

}  // namespace

PsoResult pso_minimize(const Objective& objective, const SearchSpace& space, std::int64_t budget,
                       std::uint64_t seed, const PsoSettings& settings) {
    space.validate();
    if (settings.population < 1) throw ConfigError("population must be >= 1");
    if (budget < settings.population) {
        std::ostringstream os;
        os << "budget " << budget << " is smaller than the population size " << settings.population;
        throw ConfigError(os.str());
    }

    const std::size_t dim = space.dim();
    const auto pop = static_cast<std::size_t>(settings.population);
    const std::int64_t iterations = budget / settings.population;
    Rng rng(seed);

    std::vector<Particle> swarm(pop);
    for (auto& p : swarm) {
        p.x.resize(dim);
        p.v.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const double width = space.hi[d] - space.lo[d];
            p.x[d] = space.lo[d] + rng.uniform() * width;
            p.v[d] = (rng.uniform() - 0.5) * width;
        }
    }

    std::vector<double> values(pop);
    auto evaluate_all = [&] {
        parallel_for(pop, settings.threads, [&](std::size_t i) { values[i] = objective(swarm[i].x); });
    };

    PsoResult result;
    result.iterations = iterations;
    result.history.reserve(static_cast<std::size_t>(iterations));

    evaluate_all();
    std::size_t gbest = 0;
    for (std::size_t i = 0; i < pop; ++i) {
        swarm[i].best_x = swarm[i].x;
        swarm[i].best = values[i];
        if (values[i] < swarm[gbest].best) gbest = i;
    }
    std::vector<double> gbest_x = swarm[gbest].best_x;
    double gbest_value = swarm[gbest].best;
    result.history.push_back(gbest_value);

    for (std::int64_t it = 1; it < iterations; ++it) {
        for (auto& p : swarm) {
            for (std::size_t d = 0; d < dim; ++d) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                p.v[d] = settings.inertia * p.v[d] + settings.c1 * r1 * (p.best_x[d] - p.x[d]) +
                         settings.c2 * r2 * (gbest_x[d] - p.x[d]);
                p.x[d] += p.v[d];
                if (p.x[d] < space.lo[d]) {
                    p.x[d] = space.lo[d];
                    p.v[d] = 0.0;
                } else if (p.x[d] > space.hi[d]) {
                    p.x[d] = space.hi[d];
                    p.v[d] = 0.0;
                }
            }
        }
        evaluate_all();
        // Sequential reduction in index order: lowest index wins ties.
        for (std::size_t i = 0; i < pop; ++i) {
            if (values[i] < swarm[i].best) {
                swarm[i].best = values[i];
                swarm[i].best_x = swarm[i].x;
            }
            if (swarm[i].best < gbest_value) {
                gbest_value = swarm[i].best;
                gbest_x = swarm[i].best_x;
            }
        }
        result.history.push_back(gbest_value);
    }

    result.best_position = std::move(gbest_x);
    result.best_value = gbest_value;
    result.evaluations_used = iterations * settings.population;
    return result;
}

}  // namespace lobcal::calib
