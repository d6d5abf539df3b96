#ifndef LOBCAL_PGPS_HPP
#define LOBCAL_PGPS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lobcal/order_book.hpp"
#include "lobcal/rng.hpp"

namespace lobcal::pgps {

/// The six calibrated parameters, vector order [delta, lambda0, c_lambda,
/// delta_s, alpha, mu].
struct PgpsParams {
    double delta = 0.025;     // per-order cancellation probability per step
    double lambda0 = 100.0;   // base placement depth, ticks
    double c_lambda = 10.0;   // depth modulation coefficient
    double delta_s = 0.001;   // q_taker increment
    double alpha = 0.15;      // provider submission probability
    double mu = 0.025;        // taker submission probability

    static constexpr std::size_t kDim = 6;
    static constexpr std::array<std::string_view, kDim> kNames = {"delta",   "lambda0", "c_lambda",
                                                                 "delta_s", "alpha",   "mu"};

    std::array<double, kDim> to_array() const noexcept {
        return {delta, lambda0, c_lambda, delta_s, alpha, mu};
    }
    static PgpsParams from_array(std::span<const double> v);

    /// Throws ParameterError naming the first offending field.
    void validate() const;

    friend bool operator==(const PgpsParams&, const PgpsParams&) = default;
};

/// Rows "data1".."data10" of the synthetic parameter table.
std::optional<PgpsParams> preset(std::string_view name);
std::vector<std::string> preset_names();

struct SimConfig {
    int n_providers = 125;
    int n_takers = 125;
    std::int64_t steps = 3600;
    std::int64_t warmup_steps = 200;
    market::Price p0 = 10000;
    std::uint64_t seed = 1;
    std::uint64_t replicate_index = 0;

    /// Needs the params for the p0 > 20 * lambda0 check.
    void validate(const PgpsParams& params) const;
};

/// State of the taker-side driver.
struct MarketState {
    double q_taker = 0.5;
    double sigma_q = 0.0;
    std::int64_t step = 0;
};

/// One recorded (post-warm-up) step, end-of-step snapshot.
struct TraceRecord {
    market::Price best_bid = 0;
    market::Price best_ask = 0;
    market::Volume traded_volume = 0;
    market::Volume best_bid_volume = 0;
    market::Volume best_ask_volume = 0;
    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SimTrace {
    std::vector<TraceRecord> records;
    PgpsParams params;
    SimConfig config;
    double sigma_q = 0.0;

    std::size_t size() const noexcept { return records.size(); }
    /// Hash of params and config, echoed in metadata sidecars.
    std::uint64_t config_hash() const noexcept;
};

/// Fixed seed namespace for the sigma_q pre-computation. Independent of any
/// simulation seed so the value is constant for a given delta_s.
inline constexpr std::uint64_t kSigmaSeed = 0x5167'6d61'5f71'0001ULL;
inline constexpr std::uint64_t kSigmaIterations = 100'000;

/// RMS of (q_taker - 1/2) along a long run of the q_taker walk from 1/2.
double precompute_sigma_q(double delta_s, std::uint64_t iterations = kSigmaIterations,
                          std::uint64_t seed = kSigmaSeed);

/// One step of the mean-reverting walk: toward 1/2 by delta_s with probability
/// 1/2 + |q - 1/2|, otherwise away; fair coin at exactly 1/2; clamped to [0, 1].
double step_q_taker(double q, double delta_s, Rng& rng);

/// lambda0 * (1 + |q - 1/2| / sigma_q * c_lambda)
double lambda_t(double q_taker, double sigma_q, double lambda0, double c_lambda) noexcept;

/// Depth offset floor(-lambda * ln u) for u in (0, 1).
market::Price depth_offset(double lambda, double u) noexcept;

/// Limit price placed behind the opposite best: asks at best_bid + 1 + offset,
/// bids at best_ask - 1 - offset. Never below 1 tick.
market::Price provider_order_price(const market::OrderBook& book, market::Side side, double lambda,
                                   double u) noexcept;
market::Price provider_order_price(const market::OrderBook& book, market::Side side, double lambda,
                                   Rng& rng) noexcept;

enum class EventKind : std::uint8_t { Limit, Market, Trade, Cancel, Discard };
std::string_view to_string(EventKind kind) noexcept;

struct Event {
    std::int64_t step;  // negative during warm-up
    EventKind kind;
    market::Side side;
    market::Price price;
    market::Volume volume;
    market::OrderId order_id;
};
using EventSink = std::function<void(const Event&)>;

/// Runs the agent simulation and records `config.steps` post-warm-up steps.
/// Deterministic in (params, config.seed, config.replicate_index).
SimTrace run_simulation(const PgpsParams& params, const SimConfig& config,
                        const EventSink& sink = {});

/// Seed actually fed to the engine of a run.
constexpr std::uint64_t simulation_stream_seed(std::uint64_t seed, std::uint64_t replicate) noexcept {
    return derive_seed(seed, "pgps.simulation", replicate);
}

}  // namespace lobcal::pgps

#endif  // LOBCAL_PGPS_HPP
