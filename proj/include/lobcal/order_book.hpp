#ifndef LOBCAL_ORDER_BOOK_HPP
#define LOBCAL_ORDER_BOOK_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace lobcal::market {

using Price = std::int64_t;   // integer ticks
using Volume = std::int64_t;
using OrderId = std::uint64_t;

enum class Side : std::uint8_t { Bid, Ask };
enum class OrderKind : std::uint8_t { Limit, Market };

constexpr Side opposite(Side s) noexcept { return s == Side::Bid ? Side::Ask : Side::Bid; }

/// Submission time: simulation step plus intra-step sequence number.
struct Arrival {
    std::int64_t step = 0;
    std::uint64_t seq = 0;
    friend auto operator<=>(const Arrival&, const Arrival&) = default;
};

struct Order {
    OrderId id = 0;
    Side side = Side::Bid;
    OrderKind kind = OrderKind::Limit;
    Price price = 0;  // ignored for market orders
    Volume volume = 1;
    Arrival arrival;
};

struct Trade {
    OrderId taker_order_id = 0;
    OrderId maker_order_id = 0;
    Price price = 0;  // always the resting order's price
    Volume volume = 0;
    std::int64_t step = 0;
    friend bool operator==(const Trade&, const Trade&) = default;
};

enum class SubmitStatus : std::uint8_t {
    Accepted,      // matched and/or rested normally
    DuplicateId,   // id already resting; nothing happened
    InvalidOrder,  // wrong kind, non-positive price or volume
    NoLiquidity,   // market order met an empty opposite side; discarded
};

struct Execution {
    SubmitStatus status = SubmitStatus::Accepted;
    std::vector<Trade> trades;
    Volume filled = 0;
    Volume rested = 0;     // limit remainder placed in the book
    Volume discarded = 0;  // market remainder dropped

    bool accepted() const noexcept { return status == SubmitStatus::Accepted; }
};

/// Resting order as seen from outside the book.
struct RestingOrder {
    OrderId id = 0;
    Side side = Side::Bid;
    Price price = 0;
    Volume remaining = 0;
    Arrival arrival;
    friend bool operator==(const RestingOrder&, const RestingOrder&) = default;
};

/// Price-time priority limit order book over integer ticks.
///
/// Levels live in ordered maps; within a level orders form an intrusive FIFO
/// list over a node pool. A flat index of resting nodes supports uniform
/// enumeration (used by per-order cancellation in the simulator) with O(1)
/// removal.
class OrderBook {
public:
    explicit OrderBook(Price reference_price = 10000);

    Execution submit_limit(const Order& order);
    Execution submit_market(const Order& order);
    /// Dispatches on order.kind.
    Execution submit(const Order& order);

    /// Removes the (remaining part of the) resting order. False if absent.
    bool cancel(OrderId id);

    /// Top of book, with fallback quotes when a side is empty. The fallback
    /// is reference_price -/+ 1, pulled inside the opposite quote if that
    /// would otherwise cross it.
    Price best_bid() const noexcept;
    Price best_ask() const noexcept;
    /// (best_bid + best_ask) / 2, exact in half ticks.
    double mid_price() const noexcept;

    std::optional<Price> top(Side side) const noexcept;
    Volume level_volume(Side side, Price price) const noexcept;
    /// Volume at the true top of book; 0 for an empty side.
    Volume best_volume(Side side) const noexcept;

    Price reference_price() const noexcept { return reference_price_; }
    bool contains(OrderId id) const noexcept { return index_.contains(id); }
    std::optional<RestingOrder> find(OrderId id) const;
    std::size_t resting_count() const noexcept { return resting_.size(); }
    /// Enumeration over resting orders; order is deterministic but unspecified.
    OrderId resting_id_at(std::size_t i) const noexcept { return nodes_[resting_[i]].id; }
    Volume total_volume(Side side) const noexcept;
    std::size_t level_count(Side side) const noexcept;

    /// Resting orders of one side in priority order (best price first, FIFO).
    std::vector<RestingOrder> snapshot(Side side) const;

private:
    static constexpr std::uint32_t kNil = 0xffffffffu;

    struct Node {
        OrderId id = 0;
        Price price = 0;
        Volume remaining = 0;
        Arrival arrival;
        std::uint32_t prev = kNil;
        std::uint32_t next = kNil;
        std::uint32_t resting_pos = kNil;
        Side side = Side::Bid;
    };
    struct Level {
        std::uint32_t head = kNil;
        std::uint32_t tail = kNil;
        Volume volume = 0;
    };
    using BidLevels = std::map<Price, Level, std::greater<>>;
    using AskLevels = std::map<Price, Level, std::less<>>;

    template <class Levels, class Crosses>
    void match_against(Levels& levels, const Order& taker, Volume& remaining, Crosses crosses,
                       std::vector<Trade>& trades);
    void rest(const Order& order, Volume remaining);
    void unlink(std::uint32_t node_index);
    std::uint32_t allocate_node();
    void release_node(std::uint32_t node_index);

    BidLevels bids_;
    AskLevels asks_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_nodes_;
    std::vector<std::uint32_t> resting_;
    std::unordered_map<OrderId, std::uint32_t> index_;
    Price reference_price_;
};

}  // namespace lobcal::market

#endif  // LOBCAL_ORDER_BOOK_HPP
