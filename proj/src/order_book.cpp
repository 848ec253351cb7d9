#include "hlob/order_book.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "hlob/errors.hpp"

namespace hlob {

template <typename Ladder>
void OrderBook::match(Ladder& ladder, Side aggressor, Volume& remaining,
                      std::optional<Price> limit, double t, std::vector<Trade>& out) {
  while (remaining > 0 && !ladder.empty()) {
    auto level_it = ladder.begin();
    const Price price = level_it->first;
    if (limit) {
      const bool crosses = aggressor == Side::Bid ? price <= *limit : price >= *limit;
      if (!crosses) break;
    }
    Level& level = level_it->second;
    while (remaining > 0 && !level.queue.empty()) {
      Order& maker = level.queue.front();
      const Volume fill = std::min(remaining, maker.volume);
      out.push_back({t, price, fill, aggressor, maker.id});
      maker.volume -= fill;
      level.total -= fill;
      remaining -= fill;
      ledger_.filled_resting += fill;
      if (maker.volume == 0) {
        forget(maker.id);
        level.queue.pop_front();
      }
    }
    if (level.queue.empty()) ladder.erase(level_it);
  }
}

LimitResult OrderBook::submit_limit(Side side, Price price, Volume volume, double t,
                                    std::uint32_t owner) {
  if (price <= 0) throw std::invalid_argument(fmt::format("limit price must be > 0 (got {})", price));
  if (volume <= 0)
    throw std::invalid_argument(fmt::format("limit volume must be > 0 (got {})", volume));

  LimitResult result;
  result.id = next_id_++;
  ledger_.submitted_limit += volume;
  Volume remaining = volume;
  if (side == Side::Bid)
    match(asks_, side, remaining, price, t, result.trades);
  else
    match(bids_, side, remaining, price, t, result.trades);
  ledger_.filled_on_entry += volume - remaining;

  result.resting = remaining;
  if (remaining > 0) {
    Order order{result.id, side, price, remaining, owner, t};
    auto rest = [&](auto& ladder) {
      Level& level = ladder[price];
      level.queue.push_back(order);
      level.total += remaining;
      index_.emplace(order.id, Locator{side, price, std::prev(level.queue.end()), slots_.size()});
      slots_.push_back(order.id);
    };
    if (side == Side::Bid)
      rest(bids_);
    else
      rest(asks_);
  }
  return result;
}

std::vector<Trade> OrderBook::submit_market(Side aggressor, Volume volume, double t) {
  if (volume <= 0)
    throw std::invalid_argument(fmt::format("market volume must be > 0 (got {})", volume));
  if (empty(opposite(aggressor)))
    throw EmptyBookSide(fmt::format("market {} order at t={} hit an empty {} side",
                                    aggressor == Side::Bid ? "buy" : "sell", t,
                                    aggressor == Side::Bid ? "ask" : "bid"));
  std::vector<Trade> trades;
  Volume remaining = volume;
  if (aggressor == Side::Bid)
    match(asks_, aggressor, remaining, std::nullopt, t, trades);
  else
    match(bids_, aggressor, remaining, std::nullopt, t, trades);
  return trades;
}

Volume OrderBook::cancel(OrderId id) {
  const auto found = index_.find(id);
  if (found == index_.end()) throw std::out_of_range(fmt::format("unknown order id {}", id));
  const Locator loc = found->second;
  const Volume volume = loc.it->volume;
  auto remove = [&](auto& ladder) {
    auto level_it = ladder.find(loc.price);
    level_it->second.total -= volume;
    level_it->second.queue.erase(loc.it);
    if (level_it->second.queue.empty()) ladder.erase(level_it);
  };
  if (loc.side == Side::Bid)
    remove(bids_);
  else
    remove(asks_);
  forget(id);
  ledger_.cancelled += volume;
  return volume;
}

void OrderBook::forget(OrderId id) {
  const auto found = index_.find(id);
  const std::size_t slot = found->second.slot;
  if (slot + 1 != slots_.size()) {
    slots_[slot] = slots_.back();
    index_.find(slots_[slot])->second.slot = slot;
  }
  slots_.pop_back();
  index_.erase(found);
}

const Order& OrderBook::order_at(std::size_t i) const {
  if (i >= slots_.size()) throw std::out_of_range(fmt::format("order slot {} out of range", i));
  return *index_.find(slots_[i])->second.it;
}

std::optional<Price> OrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<Price> OrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

Price OrderBook::spread() const {
  if (bids_.empty() || asks_.empty()) throw std::logic_error("spread of a one-sided book");
  return asks_.begin()->first - bids_.begin()->first;
}

Price OrderBook::mid_half_ticks() const {
  if (bids_.empty() || asks_.empty()) throw std::logic_error("mid-price of a one-sided book");
  return asks_.begin()->first + bids_.begin()->first;
}

std::vector<PriceLevel> OrderBook::levels(Side side, std::size_t depth) const {
  std::vector<PriceLevel> out;
  auto collect = [&](const auto& ladder) {
    for (const auto& [price, level] : ladder) {
      if (out.size() == depth) break;
      out.push_back({price, level.total});
    }
  };
  if (side == Side::Bid)
    collect(bids_);
  else
    collect(asks_);
  return out;
}

std::size_t OrderBook::level_count(Side side) const {
  return side == Side::Bid ? bids_.size() : asks_.size();
}

std::optional<Order> OrderBook::find(OrderId id) const {
  const auto found = index_.find(id);
  if (found == index_.end()) return std::nullopt;
  return *found->second.it;
}

Volume OrderBook::resting_volume() const {
  Volume v = 0;
  for (const auto& [p, level] : bids_) v += level.total;
  for (const auto& [p, level] : asks_) v += level.total;
  return v;
}

bool OrderBook::empty(Side side) const { return side == Side::Bid ? bids_.empty() : asks_.empty(); }

void OrderBook::for_each_order(const std::function<void(const Order&)>& visit) const {
  for (const auto& [p, level] : bids_)
    for (const auto& o : level.queue) visit(o);
  for (const auto& [p, level] : asks_)
    for (const auto& o : level.queue) visit(o);
}

Snapshot OrderBook::snapshot(std::int64_t ts_ms, std::optional<TradePrint> trade) const {
  return Snapshot{ts_ms, levels(Side::Bid, kSnapshotDepth), levels(Side::Ask, kSnapshotDepth), trade};
}

void write_trades_csv(std::ostream& os, const std::vector<Trade>& trades) {
  os << "t,side,price_ticks,volume\n";
  for (const auto& tr : trades)
    os << fmt::format("{:.6f},{},{},{}\n", tr.t, side_code(tr.aggressor), tr.price, tr.volume);
}

std::optional<TradePrint> trade_print(const std::vector<Trade>& fills) {
  if (fills.empty()) return std::nullopt;
  TradePrint print{fills.back().price, 0};
  for (const auto& f : fills) print.quantity += f.volume;
  return print;
}

}  // namespace hlob
