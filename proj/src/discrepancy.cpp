#include "lobcal/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lobcal/error.hpp"

namespace lobcal::discrepancy {

std::string_view to_string(Metric m) noexcept { return m == Metric::Wasserstein ? "wasserstein" : "mse"; }
std::string_view to_string(Aggregation a) noexcept { return a == Aggregation::Max ? "max" : "mean"; }
std::string_view to_string(Normalization n) noexcept {
    switch (n) {
        case Normalization::TargetMinMax: return "target";
        case Normalization::JointMinMax: return "joint";
        case Normalization::None: return "none";
    }
    return "?";
}

double wasserstein_sorted(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ConfigError("wasserstein: empty input");
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    // Between consecutive merged points the CDF gap is |i/n - j/m|, where i and
    // j count samples <= the left endpoint.
    std::size_t i = 0, j = 0;
    double prev = std::min(x[0], y[0]);
    double acc = 0.0;
    while (i < n || j < m) {
        const double v = (j >= m || (i < n && x[i] <= y[j])) ? x[i] : y[j];
        const double gap = std::abs(static_cast<double>(i) * static_cast<double>(m) -
                                    static_cast<double>(j) * static_cast<double>(n));
        acc += gap * (v - prev);
        prev = v;
        const std::size_t before = i + j;
        while (i < n && x[i] == v) ++i;
        while (j < m && y[j] == v) ++j;
        if (i + j == before) throw ConfigError("wasserstein: non-finite sample");
    }
    return acc / (static_cast<double>(n) * static_cast<double>(m));
}

double wasserstein(std::span<const double> x, std::span<const double> y) {
    std::vector<double> sx(x.begin(), x.end());
    std::vector<double> sy(y.begin(), y.end());
    std::sort(sx.begin(), sx.end());
    std::sort(sy.begin(), sy.end());
    return wasserstein_sorted(sx, sy);
}

double mse(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ConfigError("mse: empty input");
    const std::size_t n = std::min(x.size(), y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
    return acc / static_cast<double>(n);
}

Bounds series_bounds(std::span<const double> x) {
    if (x.empty()) return {0.0, 0.0};
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return {*lo, *hi};
}

Bounds joint_bounds(std::span<const double> x, std::span<const double> y) {
    if (x.empty()) return series_bounds(y);
    if (y.empty()) return series_bounds(x);
    const Bounds a = series_bounds(x);
    const Bounds b = series_bounds(y);
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

std::vector<double> minmax_normalize(std::span<const double> x, Bounds b) {
    std::vector<double> out(x.size(), 0.0);
    if (!(b.hi > b.lo)) return out;
    const double width = b.hi - b.lo;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - b.lo) / width;
    return out;
}

double metric_value(Metric metric, std::span<const double> x, std::span<const double> y) {
    return metric == Metric::Wasserstein ? wasserstein(x, y) : mse(x, y);
}

ObjectiveSpec ObjectiveSpec::first_k(int k) {
    if (k < 1 || k > features::kFeatureCount) throw ConfigError("objective needs 1..6 features");
    ObjectiveSpec s;
    s.feature_ids.resize(static_cast<std::size_t>(k));
    std::iota(s.feature_ids.begin(), s.feature_ids.end(), 1);
    return s;
}

void ObjectiveSpec::validate() const {
    features::validate_feature_ids(feature_ids);
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
}

double DiscrepancyReport::value_of(int feature_id) const {
    for (std::size_t i = 0; i < feature_ids.size(); ++i)
        if (feature_ids[i] == feature_id) return values[i];
    throw MissingFeatureError("feature f" + std::to_string(feature_id) + " not in report");
}

double aggregate(Aggregation a, std::span<const double> values) {
    if (values.empty()) throw ConfigError("cannot aggregate zero discrepancies");
    if (a == Aggregation::Max) return *std::max_element(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

PreparedObjective::PreparedObjective(ObjectiveSpec spec, const features::FeatureMatrix& target)
    : spec_(std::move(spec)) {
    spec_.validate();
    target.require(spec_.feature_ids);
    for (int id : spec_.feature_ids) {
        const auto& s = target.at(id);
        if (s.values.empty()) throw ConfigError("target feature f" + std::to_string(id) + " is empty");
        TargetFeature tf;
        tf.id = id;
        tf.raw = s.values;
        tf.sorted = s.values;
        std::sort(tf.sorted.begin(), tf.sorted.end());
        tf.bounds = {tf.sorted.front(), tf.sorted.back()};
        targets_.push_back(std::move(tf));
    }
}

DiscrepancyReport PreparedObjective::compare(const features::FeatureMatrix& candidate) const {
    candidate.require(spec_.feature_ids);
    DiscrepancyReport report;
    report.aggregation = spec_.aggregation;
    for (const TargetFeature& tf : targets_) {
        const auto& cand = candidate.at(tf.id).values;
        if (cand.empty()) throw ConfigError("candidate feature f" + std::to_string(tf.id) + " is empty");

        Bounds b{};
        switch (spec_.normalization) {
            case Normalization::TargetMinMax: b = tf.bounds; break;
            case Normalization::JointMinMax: b = joint_bounds(tf.raw, cand); break;
            case Normalization::None: break;
        }
        auto norm = [&](std::span<const double> v) {
            return spec_.normalization == Normalization::None ? std::vector<double>(v.begin(), v.end())
                                                              : minmax_normalize(v, b);
        };

        double d;
        if (spec_.metric == Metric::Wasserstein) {
            // Min-max is increasing, so sorting commutes with it.
            std::vector<double> sorted_cand(cand.begin(), cand.end());
            std::sort(sorted_cand.begin(), sorted_cand.end());
            d = wasserstein_sorted(norm(tf.sorted), norm(sorted_cand));
        } else {
            d = mse(norm(tf.raw), norm(cand));
        }
        report.feature_ids.push_back(tf.id);
        report.values.push_back(d);
        report.bounds.push_back(spec_.normalization == Normalization::None ? Bounds{0.0, 0.0} : b);
    }
    report.aggregate = aggregate(spec_.aggregation, report.values);
    return report;
}

DiscrepancyReport PreparedObjective::evaluate(const pgps::PgpsParams& params, const pgps::SimConfig& base) const {
    std::vector<DiscrepancyReport> reports;
    reports.reserve(static_cast<std::size_t>(spec_.replicates));
    for (int r = 0; r < spec_.replicates; ++r) {
        pgps::SimConfig cfg = base;
        cfg.replicate_index = static_cast<std::uint64_t>(r);
        const pgps::SimTrace trace = pgps::run_simulation(params, cfg);
        reports.push_back(compare(features::extract(trace, spec_.feature_ids)));
    }
    return average_reports(reports);
}

DiscrepancyReport evaluate_objective(const ObjectiveSpec& spec, const features::FeatureMatrix& target,
                                     const pgps::PgpsParams& params, const pgps::SimConfig& base) {
    return PreparedObjective(spec, target).evaluate(params, base);
}

DiscrepancyReport average_reports(std::span<const DiscrepancyReport> reports) {
    if (reports.empty()) throw ConfigError("no reports to average");
    DiscrepancyReport out = reports.front();
    if (reports.size() == 1) return out;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        double s = 0.0;
        for (const auto& r : reports) s += r.values.at(k);
        out.values[k] = s / static_cast<double>(reports.size());
    }
    out.aggregate = aggregate(out.aggregation, out.values);
    return out;
}

}  // namespace lobcal::discrepancy
