#ifndef LOBCAL_IO_HPP
#define LOBCAL_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lobcal/calibrator.hpp"
#include "lobcal/discrepancy.hpp"
#include "lobcal/features.hpp"
#include "lobcal/identifiability.hpp"
#include "lobcal/pgps.hpp"
#include "lobcal/validation.hpp"

namespace lobcal::io {

inline constexpr std::string_view kTraceHeader = "t,best_bid,best_ask,traded_volume,best_bid_volume,best_ask_volume";

/// Shortest representation that round-trips.
std::string format_double(double v);

/// Writes to a sibling temp file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// SimTrace CSV ------------------------------------------------------------

std::string trace_csv(const pgps::SimTrace& trace);
/// Records only; params/config keep their defaults.
pgps::SimTrace parse_trace_csv(std::string_view text, std::string_view source = "<memory>");
nlohmann::json trace_metadata(const pgps::SimTrace& trace);

// FeatureMatrix CSV (also the ingestion format for observed data) ----------

std::string features_csv(const features::FeatureMatrix& m);
/// Header `t,f<id>,...`. Rejects non-increasing t, negative volumes
/// (f2, f5, f6), non-numeric or blank cells (except trailing f3), with
/// the offending line number. Tagged Observed.
features::FeatureMatrix parse_features_csv(std::string_view text, std::string_view source = "<memory>");
features::FeatureMatrix ingest_real_data(const std::filesystem::path& path);

/// Accepts either CSV flavour: trace files are run through extract() for all
/// six features, feature files are ingested as-is.
features::FeatureMatrix read_feature_source(const std::filesystem::path& path);

// Reports ------------------------------------------------------------------

nlohmann::json to_json(const pgps::PgpsParams& p);
nlohmann::json to_json(const pgps::SimConfig& c);
nlohmann::json to_json(const discrepancy::ObjectiveSpec& s);
nlohmann::json to_json(const discrepancy::DiscrepancyReport& r);
nlohmann::json to_json(const calib::CalibrationResult& r);
nlohmann::json to_json(const validation::ValidationReport& r);

std::string calibration_history_csv(const calib::CalibrationResult& r);

/// One row per cell: swept coordinates, D1..D6, in_S1..in_S6, in_cap_K1..K6.
std::string grid_csv(const ident::GridReport& report, const ident::TopQSets& sets,
                     const ident::IntersectionStats& stats);
/// One row per K: cardinality, P_K, beta_K and both identity checks.
std::string grid_summary_csv(const ident::IntersectionStats& stats);
nlohmann::json grid_metadata(const ident::GridReport& report, double q);

/// step,event,side,price,volume,order_id
std::string event_log_header();
std::string event_log_row(const pgps::Event& e);

}  // namespace lobcal::io

#endif  // LOBCAL_IO_HPP
