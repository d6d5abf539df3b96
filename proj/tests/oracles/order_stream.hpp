// Random mixed limit/market/cancel streams shared by the matcher tests.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lobcal/order_book.hpp"

namespace oracle {

struct StreamOp {
    bool is_cancel = false;
    lobcal::market::Order order;
    lobcal::market::OrderId cancel_id = 0;
};

inline std::vector<StreamOp> random_stream(std::uint64_t seed, int n) {
    using namespace lobcal::market;
    std::mt19937_64 gen(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
    std::vector<StreamOp> ops;
    OrderId next = 1;
    for (int i = 0; i < n; ++i) {
        StreamOp op;
        const int r = pick(0, 99);
        if (r < 20 && next > 1) {
            op.is_cancel = true;
            // Sometimes an id that never existed or is long gone.
            op.cancel_id = static_cast<OrderId>(pick(1, static_cast<int>(next) + 2));
        } else {
            Order& o = op.order;
            o.kind = r < 40 ? OrderKind::Market : OrderKind::Limit;
            o.side = pick(0, 1) ? Side::Bid : Side::Ask;
            o.price = o.kind == OrderKind::Limit ? 95 + pick(0, 10) : 0;
            o.volume = pick(1, 5);
            // An occasional reused id exercises the duplicate path.
            o.id = (pick(0, 49) == 0 && next > 1) ? static_cast<OrderId>(pick(1, static_cast<int>(next) - 1)) : next++;
            o.arrival = {i / 10, static_cast<std::uint64_t>(i)};
        }
        ops.push_back(op);
    }
    return ops;
}

}  // namespace oracle
