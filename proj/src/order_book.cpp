#include "lobcal/order_book.hpp"

#include <algorithm>

namespace lobcal::market {

OrderBook::OrderBook(Price reference_price) : reference_price_(reference_price) {}

std::uint32_t OrderBook::allocate_node() {
    if (!free_nodes_.empty()) {
        const std::uint32_t n = free_nodes_.back();
        free_nodes_.pop_back();
        return n;
    }
    nodes_.emplace_back();
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

void OrderBook::release_node(std::uint32_t n) {
    // swap-remove from the resting index
    const std::uint32_t pos = nodes_[n].resting_pos;
    const std::uint32_t last = resting_.back();
    resting_[pos] = last;
    nodes_[last].resting_pos = pos;
    resting_.pop_back();

    index_.erase(nodes_[n].id);
    nodes_[n] = Node{};
    free_nodes_.push_back(n);
}

template <class Levels, class Crosses>
void OrderBook::match_against(Levels& levels, const Order& taker, Volume& remaining,
                              Crosses crosses, std::vector<Trade>& trades) {
    while (remaining > 0 && !levels.empty()) {
        auto it = levels.begin();
        if (!crosses(it->first)) break;
        Level& level = it->second;
        while (remaining > 0 && level.head != kNil) {
            const std::uint32_t maker = level.head;
            Node& m = nodes_[maker];
            const Volume qty = std::min(remaining, m.remaining);
            trades.push_back(Trade{taker.id, m.id, m.price, qty, taker.arrival.step});
            reference_price_ = m.price;
            remaining -= qty;
            m.remaining -= qty;
            level.volume -= qty;
            if (m.remaining == 0) {
                level.head = m.next;
                if (level.head != kNil)
                    nodes_[level.head].prev = kNil;
                else
                    level.tail = kNil;
                release_node(maker);
            }
        }
        if (level.head == kNil) levels.erase(it);
    }
}

void OrderBook::rest(const Order& order, Volume remaining) {
    const std::uint32_t n = allocate_node();
    Node& node = nodes_[n];
    node.id = order.id;
    node.price = order.price;
    node.remaining = remaining;
    node.arrival = order.arrival;
    node.side = order.side;
    node.resting_pos = static_cast<std::uint32_t>(resting_.size());
    resting_.push_back(n);
    index_.emplace(order.id, n);

    auto append = [&](Level& level) {
        node.prev = level.tail;
        node.next = kNil;
        if (level.tail != kNil)
            nodes_[level.tail].next = n;
        else
            level.head = n;
        level.tail = n;
        level.volume += remaining;
    };
    if (order.side == Side::Bid)
        append(bids_[order.price]);
    else
        append(asks_[order.price]);
}

Execution OrderBook::submit_limit(const Order& order) {
    Execution ex;
    if (order.kind != OrderKind::Limit || order.price <= 0 || order.volume < 1) {
        ex.status = SubmitStatus::InvalidOrder;
        return ex;
    }
    if (index_.contains(order.id)) {
        ex.status = SubmitStatus::DuplicateId;
        return ex;
    }
    Volume remaining = order.volume;
    if (order.side == Side::Bid)
        match_against(asks_, order, remaining, [&](Price p) { return p <= order.price; }, ex.trades);
    else
        match_against(bids_, order, remaining, [&](Price p) { return p >= order.price; }, ex.trades);
    ex.filled = order.volume - remaining;
    if (remaining > 0) {
        rest(order, remaining);
        ex.rested = remaining;
    }
    return ex;
}

Execution OrderBook::submit_market(const Order& order) {
    Execution ex;
    if (order.kind != OrderKind::Market || order.volume < 1) {
        ex.status = SubmitStatus::InvalidOrder;
        return ex;
    }
    if (index_.contains(order.id)) {
        ex.status = SubmitStatus::DuplicateId;
        return ex;
    }
    Volume remaining = order.volume;
    auto any = [](Price) { return true; };
    if (order.side == Side::Bid)
        match_against(asks_, order, remaining, any, ex.trades);
    else
        match_against(bids_, order, remaining, any, ex.trades);
    ex.filled = order.volume - remaining;
    ex.discarded = remaining;
    if (ex.trades.empty()) ex.status = SubmitStatus::NoLiquidity;
    return ex;
}

Execution OrderBook::submit(const Order& order) {
    return order.kind == OrderKind::Limit ? submit_limit(order) : submit_market(order);
}

void OrderBook::unlink(std::uint32_t n) {
    Node& node = nodes_[n];
    auto detach = [&](auto& levels) {
        auto it = levels.find(node.price);
        Level& level = it->second;
        if (node.prev != kNil)
            nodes_[node.prev].next = node.next;
        else
            level.head = node.next;
        if (node.next != kNil)
            nodes_[node.next].prev = node.prev;
        else
            level.tail = node.prev;
        level.volume -= node.remaining;
        if (level.head == kNil) levels.erase(it);
    };
    if (node.side == Side::Bid)
        detach(bids_);
    else
        detach(asks_);
}

bool OrderBook::cancel(OrderId id) {
    const auto it = index_.find(id);
    if (it == index_.end()) return false;
    const std::uint32_t n = it->second;
    unlink(n);
    release_node(n);
    return true;
}

std::optional<Price> OrderBook::top(Side side) const noexcept {
    if (side == Side::Bid) {
        if (bids_.empty()) return std::nullopt;
        return bids_.begin()->first;
    }
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->first;
}

Price OrderBook::best_bid() const noexcept {
    if (!bids_.empty()) return bids_.begin()->first;
    const Price anchor = asks_.empty() ? reference_price_ : std::min(reference_price_, asks_.begin()->first);
    return anchor - 1;
}

Price OrderBook::best_ask() const noexcept {
    if (!asks_.empty()) return asks_.begin()->first;
    const Price anchor = bids_.empty() ? reference_price_ : std::max(reference_price_, bids_.begin()->first);
    return anchor + 1;
}

double OrderBook::mid_price() const noexcept {
    return static_cast<double>(best_bid() + best_ask()) / 2.0;
}

Volume OrderBook::level_volume(Side side, Price price) const noexcept {
    if (side == Side::Bid) {
        const auto it = bids_.find(price);
        return it == bids_.end() ? 0 : it->second.volume;
    }
    const auto it = asks_.find(price);
    return it == asks_.end() ? 0 : it->second.volume;
}

Volume OrderBook::best_volume(Side side) const noexcept {
    if (side == Side::Bid) return bids_.empty() ? 0 : bids_.begin()->second.volume;
    return asks_.empty() ? 0 : asks_.begin()->second.volume;
}

Volume OrderBook::total_volume(Side side) const noexcept {
    Volume v = 0;
    if (side == Side::Bid)
        for (const auto& [p, level] : bids_) v += level.volume;
    else
        for (const auto& [p, level] : asks_) v += level.volume;
    return v;
}

std::size_t OrderBook::level_count(Side side) const noexcept {
    return side == Side::Bid ? bids_.size() : asks_.size();
}

std::optional<RestingOrder> OrderBook::find(OrderId id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    const Node& node = nodes_[it->second];
    return RestingOrder{node.id, node.side, node.price, node.remaining, node.arrival};
}

std::vector<RestingOrder> OrderBook::snapshot(Side side) const {
    std::vector<RestingOrder> out;
    auto walk = [&](const auto& levels) {
        for (const auto& [price, level] : levels)
            for (std::uint32_t n = level.head; n != kNil; n = nodes_[n].next) {
                const Node& node = nodes_[n];
                out.push_back(RestingOrder{node.id, node.side, node.price, node.remaining, node.arrival});
            }
    };
    if (side == Side::Bid)
        walk(bids_);
    else
        walk(asks_);
    return out;
}

}  // namespace lobcal::market
