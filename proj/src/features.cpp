#include "lobcal/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lobcal/error.hpp"

namespace lobcal::features {

void FeatureMatrix::insert(FeatureSeries series) {
    const int id = series.feature_id;
    series_.insert_or_assign(id, std::move(series));
}

const FeatureSeries& FeatureMatrix::at(int feature_id) const {
    const auto it = series_.find(feature_id);
    if (it == series_.end()) throw MissingFeatureError("feature f" + std::to_string(feature_id) + " is missing");
    return it->second;
}

std::vector<int> FeatureMatrix::ids() const {
    std::vector<int> out;
    for (const auto& [id, s] : series_) out.push_back(id);
    return out;
}

std::size_t FeatureMatrix::steps() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, s] : series_) n = std::max(n, s.length());
    return n;
}

void FeatureMatrix::require(std::span<const int> feature_ids) const {
    std::string missing;
    for (int id : feature_ids)
        if (!has(id)) missing += (missing.empty() ? "f" : ", f") + std::to_string(id);
    if (!missing.empty()) throw MissingFeatureError("missing features: " + missing);
}

void validate_feature_ids(std::span<const int> feature_ids) {
    if (feature_ids.empty()) throw ConfigError("feature list is empty");
    std::vector<int> seen;
    for (int id : feature_ids) {
        if (id < 1 || id > kFeatureCount)
            throw ConfigError("feature id " + std::to_string(id) + " outside 1..6");
        if (std::find(seen.begin(), seen.end(), id) != seen.end())
            throw ConfigError("feature id " + std::to_string(id) + " listed twice");
        seen.push_back(id);
    }
}

std::vector<int> all_feature_ids() { return {1, 2, 3, 4, 5, 6}; }

std::vector<int> parse_feature_list(const std::string& text) {
    std::vector<int> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty entry in feature list '" + text + "'");
        item = item.substr(b, e - b + 1);
        if (!item.empty() && (item[0] == 'f' || item[0] == 'F')) item.erase(0, 1);
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty())
            throw ConfigError("bad entry '" + item + "' in feature list '" + text + "'");
        ids.push_back(id);
    }
    validate_feature_ids(ids);
    return ids;
}

FeatureMatrix extract(std::span<const pgps::TraceRecord> records, std::span<const int> feature_ids) {
    validate_feature_ids(feature_ids);
    const std::size_t n = records.size();
    if (n < 2 && std::find(feature_ids.begin(), feature_ids.end(), 3) != feature_ids.end())
        throw ConfigError("feature f3 needs a trace of at least 2 steps");

    auto mid = [](const pgps::TraceRecord& r) { return static_cast<double>(r.best_bid + r.best_ask) / 2.0; };

    FeatureMatrix m(Source::Simulated);
    for (int id : feature_ids) {
        FeatureSeries s;
        s.feature_id = id;
        s.values.reserve(n);
        switch (id) {
            case 1:
                for (const auto& r : records) s.values.push_back(mid(r));
                break;
            case 2:
                for (const auto& r : records) s.values.push_back(static_cast<double>(r.traded_volume));
                break;
            case 3:
                for (std::size_t t = 0; t + 1 < n; ++t)
                    s.values.push_back(std::log(mid(records[t + 1])) - std::log(mid(records[t])));
                break;
            case 4:
                for (const auto& r : records) s.values.push_back(static_cast<double>(r.best_ask - r.best_bid));
                break;
            case 5:
                for (const auto& r : records) s.values.push_back(static_cast<double>(r.best_bid_volume));
                break;
            case 6:
                for (const auto& r : records) s.values.push_back(static_cast<double>(r.best_ask_volume));
                break;
        }
        m.insert(std::move(s));
    }
    return m;
}

FeatureMatrix extract(const pgps::SimTrace& trace, std::span<const int> feature_ids) {
    return extract(std::span<const pgps::TraceRecord>(trace.records), feature_ids);
}

}  // namespace lobcal::features
