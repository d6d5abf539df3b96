#include "lobcal/validation.hpp"

#include "lobcal/error.hpp"

namespace lobcal::validation {

ValidationReport validate(const features::FeatureMatrix& target, const features::FeatureMatrix& simulated) {
    const std::vector<int> ids = target.ids();
    if (ids.empty()) throw ConfigError("target has no features");
    simulated.require(ids);

    ValidationReport r;
    r.feature_ids = ids;
    for (int id : ids) {
        const auto& t = target.at(id).values;
        const auto& s = simulated.at(id).values;
        const discrepancy::Bounds b = discrepancy::series_bounds(t);
        const auto tn = discrepancy::minmax_normalize(t, b);
        const auto sn = discrepancy::minmax_normalize(s, b);
        r.wasserstein.push_back(discrepancy::wasserstein(tn, sn));
        r.mse.push_back(discrepancy::mse(tn, sn));
        r.bounds.push_back(b);
    }
    r.mean_wasserstein = discrepancy::aggregate(discrepancy::Aggregation::Mean, r.wasserstein);
    r.mean_mse = discrepancy::aggregate(discrepancy::Aggregation::Mean, r.mse);
    return r;
}

}  // namespace lobcal::validation
