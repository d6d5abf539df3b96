#ifndef LOBCAL_VALIDATION_HPP
#define LOBCAL_VALIDATION_HPP

#include <vector>

#include "lobcal/discrepancy.hpp"
#include "lobcal/features.hpp"

namespace lobcal::validation {

/// Per-feature W and MSE between a target and a simulated feature matrix,
/// both min-max normalized with the target's bounds.
struct ValidationReport {
    std::vector<int> feature_ids;
    std::vector<double> wasserstein;
    std::vector<double> mse;
    std::vector<discrepancy::Bounds> bounds;
    double mean_wasserstein = 0.0;
    double mean_mse = 0.0;
};

/// Uses every feature present in the target; the simulated matrix must carry
/// all of them (MissingFeatureError lists the gap otherwise).
ValidationReport validate(const features::FeatureMatrix& target, const features::FeatureMatrix& simulated);

}  // namespace lobcal::validation

#endif  // LOBCAL_VALIDATION_HPP
