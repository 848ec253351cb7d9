#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <list>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hlob/types.hpp"

namespace hlob {

struct Order {
  OrderId id{0};
  Side side{Side::Bid};
  Price price{0};
  Volume volume{0};
  std::uint32_t owner{0};
  double t{0.0};
};

struct Trade {
  double t{0.0};
  Price price{0};
  Volume volume{0};
  Side aggressor{Side::Bid};
  OrderId maker_id{0};
};

struct LimitResult {
  OrderId id{0};
  std::vector<Trade> trades;
  /// Volume left resting after any crossing fills.
  Volume resting{0};
};

/// Running totals for the volume-conservation identity
/// submitted_limit = filled_resting + filled_on_entry + cancelled + resting.
struct VolumeLedger {
  Volume submitted_limit{0};
  /// Resting (maker) volume removed by trades.
  Volume filled_resting{0};
  /// Limit volume that crossed and traded before it could rest.
  Volume filled_on_entry{0};
  Volume cancelled{0};
};

/// Price-time priority book. Bid `Side` means buyer: a Bid market order
/// lifts asks, a Bid limit order rests on the bid ladder.
class OrderBook {
 public:
  /// Rests the order, first matching any crossing volume on the opposite
  /// ladder. Ids are assigned monotonically starting at 1.
  LimitResult submit_limit(Side side, Price price, Volume volume, double t,
                           std::uint32_t owner = 0);

  /// Walks the opposite ladder best-first and FIFO within a level. Fills
  /// partially if the ladder runs out. Throws EmptyBookSide if it is empty.
  std::vector<Trade> submit_market(Side aggressor, Volume volume, double t);

  /// Removes a resting order and returns its remaining volume.
  Volume cancel(OrderId id);

  [[nodiscard]] std::optional<Price> best_bid() const;
  [[nodiscard]] std::optional<Price> best_ask() const;
  [[nodiscard]] std::optional<Price> best(Side side) const {
    return side == Side::Bid ? best_bid() : best_ask();
  }

  /// best_ask - best_bid in ticks; throws std::logic_error on a one-sided book.
  [[nodiscard]] Price spread() const;
  /// best_ask + best_bid, i.e. the mid-price in half-ticks.
  [[nodiscard]] Price mid_half_ticks() const;
  [[nodiscard]] double mid() const { return static_cast<double>(mid_half_ticks()) / 2.0; }

  /// Aggregated top `depth` levels of one side, best first.
  [[nodiscard]] std::vector<PriceLevel> levels(Side side, std::size_t depth) const;
  [[nodiscard]] std::size_t level_count(Side side) const;
  [[nodiscard]] std::size_t order_count() const { return index_.size(); }
  [[nodiscard]] bool contains(OrderId id) const { return index_.contains(id); }
  [[nodiscard]] std::optional<Order> find(OrderId id) const;
  /// The i-th resting order, i < order_count(), in an unspecified but
  /// deterministic storage order. For uniform sampling of resting orders.
  [[nodiscard]] const Order& order_at(std::size_t i) const;
  [[nodiscard]] Volume resting_volume() const;
  [[nodiscard]] bool empty(Side side) const;
  [[nodiscard]] const VolumeLedger& ledger() const { return ledger_; }
  [[nodiscard]] OrderId next_id() const { return next_id_; }

  /// Visits resting orders: bids best-to-worst, then asks best-to-worst,
  /// FIFO within each level.
  void for_each_order(const std::function<void(const Order&)>& visit) const;

  /// Top-five-level view in the snapshot format.
  [[nodiscard]] Snapshot snapshot(std::int64_t ts_ms,
                                  std::optional<TradePrint> trade = std::nullopt) const;

 private:
  struct Level {
    std::list<Order> queue;
    Volume total{0};
  };
  using BidLadder = std::map<Price, Level, std::greater<>>;
  using AskLadder = std::map<Price, Level, std::less<>>;
  struct Locator {
    Side side;
    Price price;
    std::list<Order>::iterator it;
    std::size_t slot;
  };

  template <typename Ladder>
  void match(Ladder& ladder, Side aggressor, Volume& remaining, std::optional<Price> limit,
             double t, std::vector<Trade>& out);

  void forget(OrderId id);

  BidLadder bids_;
  AskLadder asks_;
  std::unordered_map<OrderId, Locator> index_;
  std::vector<OrderId> slots_;
  VolumeLedger ledger_;
  OrderId next_id_{1};
};

/// Trade log CSV: header `t,side,price_ticks,volume` (side is the aggressor).
void write_trades_csv(std::ostream& os, const std::vector<Trade>& trades);

/// Collapses the fills of one market order into the single transaction
/// reported by a snapshot: total volume at the last (worst) execution price.
std::optional<TradePrint> trade_print(const std::vector<Trade>& fills);

}  // namespace hlob
