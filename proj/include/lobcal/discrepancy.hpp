#ifndef LOBCAL_DISCREPANCY_HPP
#define LOBCAL_DISCREPANCY_HPP

#include <span>
#include <string_view>
#include <vector>

#include "lobcal/features.hpp"
#include "lobcal/pgps.hpp"

namespace lobcal::discrepancy {

enum class Metric { Wasserstein, Mse };
enum class Aggregation { Max, Mean };
enum class Normalization { TargetMinMax, JointMinMax, None };

std::string_view to_string(Metric m) noexcept;
std::string_view to_string(Aggregation a) noexcept;
std::string_view to_string(Normalization n) noexcept;

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Integral of |U - V| over the real line, U and V the empirical CDFs of x and
/// y. Exact: the CDF difference is piecewise constant between merged sample
/// points. Throws ConfigError on empty input.
double wasserstein(std::span<const double> x, std::span<const double> y);
/// Same, for inputs already sorted ascending.
double wasserstein_sorted(std::span<const double> x, std::span<const double> y);

/// Mean squared difference over the common prefix min(|x|, |y|).
double mse(std::span<const double> x, std::span<const double> y);

Bounds series_bounds(std::span<const double> x);
Bounds joint_bounds(std::span<const double> x, std::span<const double> y);
/// (x - lo) / (hi - lo); all zeros when hi == lo.
std::vector<double> minmax_normalize(std::span<const double> x, Bounds b);

double metric_value(Metric metric, std::span<const double> x, std::span<const double> y);

struct ObjectiveSpec {
    std::vector<int> feature_ids{1};
    Metric metric = Metric::Wasserstein;
    Aggregation aggregation = Aggregation::Max;
    Normalization normalization = Normalization::TargetMinMax;
    int replicates = 1;

    /// The objective family member that uses the first k features.
    static ObjectiveSpec first_k(int k);
    void validate() const;
};

struct DiscrepancyReport {
    std::vector<int> feature_ids;
    std::vector<double> values;  // D_k, parallel to feature_ids
    double aggregate = 0.0;      // F
    std::vector<Bounds> bounds;  // normalization bounds used, per feature (first replicate)
    Aggregation aggregation = Aggregation::Max;

    double value_of(int feature_id) const;
};

double aggregate(Aggregation a, std::span<const double> values);

/// An objective bound to one target. Target series are validated, bounded and
/// pre-sorted once; candidate evaluation is const and thread-safe.
class PreparedObjective {
public:
    PreparedObjective(ObjectiveSpec spec, const features::FeatureMatrix& target);

    const ObjectiveSpec& spec() const noexcept { return spec_; }

    /// One candidate feature matrix against the target.
    DiscrepancyReport compare(const features::FeatureMatrix& candidate) const;

    /// Simulates `params` spec().replicates times (replicate indices
    /// 0..R-1 on top of base.seed), averages D_k, then aggregates.
    DiscrepancyReport evaluate(const pgps::PgpsParams& params, const pgps::SimConfig& base) const;

private:
    struct TargetFeature {
        int id = 0;
        std::vector<double> raw;     // in time order (MSE)
        std::vector<double> sorted;  // ascending (Wasserstein)
        Bounds bounds;
    };
    ObjectiveSpec spec_;
    std::vector<TargetFeature> targets_;
};

/// Convenience wrapper around PreparedObjective.
DiscrepancyReport evaluate_objective(const ObjectiveSpec& spec, const features::FeatureMatrix& target,
                                     const pgps::PgpsParams& params, const pgps::SimConfig& base);

/// Reports averaged per feature, then re-aggregated.
DiscrepancyReport average_reports(std::span<const DiscrepancyReport> reports);

}  // namespace lobcal::discrepancy

#endif  // LOBCAL_DISCREPANCY_HPP
