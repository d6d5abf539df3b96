#ifndef LOBCAL_FEATURES_HPP
#define LOBCAL_FEATURES_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lobcal/pgps.hpp"

namespace lobcal::features {

/// Feature ids:
///   1 mid-price, 2 traded volume, 3 log mid-price return,
///   4 spread, 5 best-bid volume, 6 best-ask volume.
inline constexpr int kFeatureCount = 6;

enum class Source { Simulated, Observed };

struct FeatureSeries {
    int feature_id = 0;
    std::vector<double> values;

    std::size_t length() const noexcept { return values.size(); }
    friend bool operator==(const FeatureSeries&, const FeatureSeries&) = default;
};

class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(Source source) : source_(source) {}

    Source source() const noexcept { return source_; }
    void set_source(Source s) noexcept { source_ = s; }

    void insert(FeatureSeries series);
    bool has(int feature_id) const noexcept { return series_.contains(feature_id); }
    /// Throws MissingFeatureError.
    const FeatureSeries& at(int feature_id) const;
    std::vector<int> ids() const;
    /// Number of time steps (length of the longest series).
    std::size_t steps() const noexcept;
    bool empty() const noexcept { return series_.empty(); }

    /// Throws MissingFeatureError listing every absent id.
    void require(std::span<const int> feature_ids) const;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::map<int, FeatureSeries> series_;
    Source source_ = Source::Simulated;
};

/// Ids must be unique and within 1..6. Throws ConfigError otherwise.
void validate_feature_ids(std::span<const int> feature_ids);
std::vector<int> all_feature_ids();
/// Parses "1,2,3" (whitespace tolerated).
std::vector<int> parse_feature_list(const std::string& text);

/// f3 has one value fewer than the trace (it needs m_{t+1}); the others
/// match the trace length.
FeatureMatrix extract(const pgps::SimTrace& trace, std::span<const int> feature_ids);
FeatureMatrix extract(std::span<const pgps::TraceRecord> records, std::span<const int> feature_ids);

}  // namespace lobcal::features

#endif  // LOBCAL_FEATURES_HPP
