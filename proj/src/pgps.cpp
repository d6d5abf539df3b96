#include "lobcal/pgps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lobcal/error.hpp"

namespace lobcal::pgps {

namespace {

// Preset rows, [delta, lambda0, c_lambda, delta_s, alpha, mu].
constexpr std::array<std::array<double, 6>, 10> kPresets = {{
    {0.025, 100, 10, 0.001, 0.15, 0.025},
    {0.002, 200, 10, 0.002, 0.1, 0.03},
    {0.05, 152, 45, 0.003, 0.13, 0.05},
    {0.02, 288, 27, 0.003, 0.11, 0.04},
    {0.04, 62, 35, 0.003, 0.12, 0.04},
    {0.01, 171, 15, 0.0015, 0.15, 0.03},
    {0.033, 114, 14, 0.0033, 0.1, 0.047},
    {0.01, 129, 30, 0.0017, 0.05, 0.03},
    {0.02, 62, 2, 0.003, 0.14, 0.02},
    {0.01, 87, 23, 0.001, 0.09, 0.05},
}};

[[noreturn]] void bad_param(std::string_view field, double value, std::string_view rule) {
    std::ostringstream os;
    os << "parameter " << field << " = " << value << " violates " << rule;
    throw ParameterError(os.str());
}

bool in_closed(double x, double lo, double hi) { return x >= lo && x <= hi; }

double cached_sigma_q(double delta_s) {
    thread_local double last_delta_s = -1.0;
    thread_local double last_sigma = 0.0;
    if (delta_s != last_delta_s) {
        last_sigma = precompute_sigma_q(delta_s);
        last_delta_s = delta_s;
    }
    return last_sigma;
}

}  // namespace

PgpsParams PgpsParams::from_array(std::span<const double> v) {
    if (v.size() != kDim) throw ParameterError("parameter vector must have 6 entries");
    return PgpsParams{v[0], v[1], v[2], v[3], v[4], v[5]};
}

void PgpsParams::validate() const {
    if (!in_closed(delta, 0.0, 1.0)) bad_param("delta", delta, "0 <= delta <= 1");
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) bad_param("lambda0", lambda0, "lambda0 > 0");
    if (!(c_lambda >= 0.0) || !std::isfinite(c_lambda)) bad_param("c_lambda", c_lambda, "c_lambda >= 0");
    if (!(delta_s > 0.0 && delta_s < 0.5)) bad_param("delta_s", delta_s, "0 < delta_s < 0.5");
    if (!in_closed(alpha, 0.0, 1.0)) bad_param("alpha", alpha, "0 <= alpha <= 1");
    if (!in_closed(mu, 0.0, 1.0)) bad_param("mu", mu, "0 <= mu <= 1");
}

std::optional<PgpsParams> preset(std::string_view name) {
    if (!name.starts_with("data")) return std::nullopt;
    const std::string_view digits = name.substr(4);
    int n = 0;
    if (digits.empty() || digits.size() > 2) return std::nullopt;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        n = n * 10 + (c - '0');
    }
    if (n < 1 || n > 10 || digits.front() == '0') return std::nullopt;
    return PgpsParams::from_array(kPresets[static_cast<std::size_t>(n - 1)]);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (int i = 1; i <= 10; ++i) names.push_back("data" + std::to_string(i));
    return names;
}

void SimConfig::validate(const PgpsParams& params) const {
    if (n_providers < 0 || n_takers < 0) throw ConfigError("agent counts must be non-negative");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
    if (!(static_cast<double>(p0) > params.lambda0 * 20.0)) {
        std::ostringstream os;
        os << "p0 = " << p0 << " must exceed 20 * lambda0 = " << params.lambda0 * 20.0;
        throw ConfigError(os.str());
    }
}

std::uint64_t SimTrace::config_hash() const noexcept {
    std::uint64_t h = hash_label("lobcal.trace");
    auto feed = [&](std::uint64_t x) { h = mix64(h ^ x); };
    for (double v : params.to_array()) feed(std::bit_cast<std::uint64_t>(v));
    feed(static_cast<std::uint64_t>(config.n_providers));
    feed(static_cast<std::uint64_t>(config.n_takers));
    feed(static_cast<std::uint64_t>(config.steps));
    feed(static_cast<std::uint64_t>(config.warmup_steps));
    feed(static_cast<std::uint64_t>(config.p0));
    feed(config.seed);
    feed(config.replicate_index);
    return h;
}

double step_q_taker(double q, double delta_s, Rng& rng) {
    const double dev = q - 0.5;
    const double u = rng.uniform();
    double next;
    if (std::abs(dev) < delta_s * 1e-9) {
        next = 0.5 + (u < 0.5 ? delta_s : -delta_s);
    } else {
        const double toward = dev > 0.0 ? -delta_s : delta_s;
        next = q + (u < 0.5 + std::abs(dev) ? toward : -toward);
    }
    return std::clamp(next, 0.0, 1.0);
}

double precompute_sigma_q(double delta_s, std::uint64_t iterations, std::uint64_t seed) {
    if (!(delta_s > 0.0 && delta_s < 0.5)) bad_param("delta_s", delta_s, "0 < delta_s < 0.5");
    if (iterations == 0) throw ConfigError("sigma_q pre-computation needs at least one iteration");
    Rng rng(seed);
    double q = 0.5;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < iterations; ++i) {
        q = step_q_taker(q, delta_s, rng);
        acc += (q - 0.5) * (q - 0.5);
    }
    return std::sqrt(acc / static_cast<double>(iterations));
}

double lambda_t(double q_taker, double sigma_q, double lambda0, double c_lambda) noexcept {
    return lambda0 * (1.0 + std::abs(q_taker - 0.5) / sigma_q * c_lambda);
}

market::Price depth_offset(double lambda, double u) noexcept {
    return static_cast<market::Price>(std::floor(-lambda * std::log(u)));
}

market::Price provider_order_price(const market::OrderBook& book, market::Side side, double lambda,
                                   double u) noexcept {
    const market::Price offset = depth_offset(lambda, u);
    const market::Price price =
        side == market::Side::Ask ? book.best_bid() + 1 + offset : book.best_ask() - 1 - offset;
    return std::max<market::Price>(price, 1);
}

market::Price provider_order_price(const market::OrderBook& book, market::Side side, double lambda,
                                   Rng& rng) noexcept {
    return provider_order_price(book, side, lambda, rng.uniform_open());
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::Limit: return "limit";
        case EventKind::Market: return "market";
        case EventKind::Trade: return "trade";
        case EventKind::Cancel: return "cancel";
        case EventKind::Discard: return "discard";
    }
    return "?";
}

SimTrace run_simulation(const PgpsParams& params, const SimConfig& config, const EventSink& sink) {
    using market::Order;
    using market::OrderKind;
    using market::Side;

    params.validate();
    config.validate(params);

    SimTrace trace;
    trace.params = params;
    trace.config = config;
    trace.sigma_q = cached_sigma_q(params.delta_s);
    trace.records.reserve(static_cast<std::size_t>(config.steps));

    Rng rng(simulation_stream_seed(config.seed, config.replicate_index));
    market::OrderBook book(config.p0);
    MarketState state{0.5, trace.sigma_q, 0};

    // 0 = provider, 1 = taker; reshuffled every step.
    std::vector<std::uint8_t> agents(static_cast<std::size_t>(config.n_providers + config.n_takers), 0);
    std::fill(agents.begin() + config.n_providers, agents.end(), std::uint8_t{1});

    std::vector<market::OrderId> doomed;
    market::OrderId next_id = 1;
    const std::int64_t total = config.warmup_steps + config.steps;

    for (std::int64_t s = 0; s < total; ++s) {
        const std::int64_t t = s - config.warmup_steps;
        state.step = t;
        state.q_taker = step_q_taker(state.q_taker, params.delta_s, rng);
        const double lambda = lambda_t(state.q_taker, state.sigma_q, params.lambda0, params.c_lambda);

        for (std::size_t i = agents.size(); i > 1; --i) std::swap(agents[i - 1], agents[rng.below(i)]);

        market::Volume traded = 0;
        std::uint64_t seq = 0;
        for (std::uint8_t agent : agents) {
            Order order;
            if (agent == 0) {
                if (!rng.bernoulli(params.alpha)) continue;
                order.side = rng.bernoulli(0.5) ? Side::Bid : Side::Ask;
                order.kind = OrderKind::Limit;
                order.price = provider_order_price(book, order.side, lambda, rng);
            } else {
                if (!rng.bernoulli(params.mu)) continue;
                order.side = rng.bernoulli(state.q_taker) ? Side::Bid : Side::Ask;
                order.kind = OrderKind::Market;
            }
            order.id = next_id++;
            order.volume = 1;
            order.arrival = {t, seq++};
            const market::Execution ex = book.submit(order);
            traded += ex.filled;
            if (sink) {
                sink({t, order.kind == OrderKind::Limit ? EventKind::Limit : EventKind::Market, order.side,
                      order.price, order.volume, order.id});
                for (const auto& tr : ex.trades)
                    sink({t, EventKind::Trade, order.side, tr.price, tr.volume, tr.maker_order_id});
                if (ex.discarded > 0)
                    sink({t, EventKind::Discard, order.side, 0, ex.discarded, order.id});
            }
        }

        // Independent Bernoulli(delta) per resting order, sampled by
        // geometric skipping over the resting index.
        const std::size_t resting = book.resting_count();
        doomed.clear();
        if (params.delta >= 1.0) {
            for (std::size_t i = 0; i < resting; ++i) doomed.push_back(book.resting_id_at(i));
        } else if (params.delta > 0.0) {
            std::uint64_t i = rng.geometric_gap(params.delta);
            while (i < resting) {
                doomed.push_back(book.resting_id_at(i));
                const std::uint64_t gap = rng.geometric_gap(params.delta);
                if (gap >= resting) break;
                i += gap + 1;
            }
        }
        for (market::OrderId id : doomed) {
            if (sink) {
                const auto r = book.find(id);
                sink({t, EventKind::Cancel, r->side, r->price, r->remaining, id});
            }
            book.cancel(id);
        }

        if (t >= 0) {
            trace.records.push_back(TraceRecord{book.best_bid(), book.best_ask(), traded,
                                                book.best_volume(Side::Bid), book.best_volume(Side::Ask)});
        }
    }
    return trace;
}

}  // namespace lobcal::pgps
