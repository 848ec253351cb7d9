#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "hlob/errors.hpp"
#include "hlob/order_book.hpp"

using namespace hlob;

TEST(OrderBook, LimitRestsOnEmptyBook) {
  OrderBook b;
  const auto r = b.submit_limit(Side::Bid, 100, 10, 0.0);
  EXPECT_EQ(r.id, 1u);
  EXPECT_TRUE(r.trades.empty());
  EXPECT_EQ(r.resting, 10);
  EXPECT_EQ(b.best_bid(), 100);
  EXPECT_FALSE(b.best_ask());
}

TEST(OrderBook, CrossingLimitTradesThenRests) {
  OrderBook b;
  b.submit_limit(Side::Ask, 101, 5, 0.0);
  const auto r = b.submit_limit(Side::Bid, 101, 8, 1.0);
  ASSERT_EQ(r.trades.size(), 1u);
  EXPECT_EQ(r.trades[0].price, 101);
  EXPECT_EQ(r.trades[0].volume, 5);
  EXPECT_EQ(r.trades[0].aggressor, Side::Bid);
  EXPECT_EQ(r.resting, 3);
  EXPECT_EQ(b.best_bid(), 101);
  EXPECT_FALSE(b.best_ask());
  EXPECT_EQ(b.levels(Side::Bid, 5)[0].quantity, 3);
}

TEST(OrderBook, FifoWithinLevel) {
  OrderBook b;
  const auto a = b.submit_limit(Side::Ask, 101, 4, 0.0).id;
  const auto c = b.submit_limit(Side::Ask, 101, 6, 1.0).id;
  const auto r = b.submit_limit(Side::Bid, 101, 4, 2.0);
  ASSERT_EQ(r.trades.size(), 1u);
  EXPECT_EQ(r.trades[0].maker_id, a);
  EXPECT_FALSE(b.contains(a));
  EXPECT_TRUE(b.contains(c));
  EXPECT_EQ(r.resting, 0);
  EXPECT_EQ(b.levels(Side::Ask, 1)[0].quantity, 6);
}

TEST(OrderBook, MarketWalksLadder) {
  OrderBook b;
  b.submit_limit(Side::Ask, 101, 5, 0.0);
  b.submit_limit(Side::Ask, 102, 7, 0.0);
  const auto t = b.submit_market(Side::Bid, 9, 1.0);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].price, 101);
  EXPECT_EQ(t[0].volume, 5);
  EXPECT_EQ(t[1].price, 102);
  EXPECT_EQ(t[1].volume, 4);
  EXPECT_EQ(b.best_ask(), 102);
  EXPECT_EQ(b.levels(Side::Ask, 5)[0].quantity, 3);
  const auto print = trade_print(t);
  ASSERT_TRUE(print);
  EXPECT_EQ(print->price, 102);
  EXPECT_EQ(print->quantity, 9);
}

TEST(OrderBook, MarketExactlyClearsLevel) {
  OrderBook b;
  b.submit_limit(Side::Bid, 100, 3, 0.0);
  b.submit_limit(Side::Bid, 100, 2, 0.0);
  b.submit_limit(Side::Bid, 99, 1, 0.0);
  b.submit_market(Side::Ask, 5, 1.0);
  EXPECT_EQ(b.best_bid(), 99);
  EXPECT_EQ(b.level_count(Side::Bid), 1u);
}

TEST(OrderBook, SmallMarketLeavesLevel) {
  OrderBook b;
  const auto id = b.submit_limit(Side::Ask, 101, 3, 0.0).id;
  b.submit_market(Side::Bid, 1, 1.0);
  EXPECT_EQ(b.find(id)->volume, 2);
  EXPECT_EQ(b.best_ask(), 101);
}

TEST(OrderBook, MarketPartialFillAndEmptySide) {
  OrderBook b;
  EXPECT_THROW(b.submit_market(Side::Bid, 1, 0.0), EmptyBookSide);
  b.submit_limit(Side::Ask, 101, 3, 0.0);
  const auto t = b.submit_market(Side::Bid, 10, 1.0);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].volume, 3);
  EXPECT_TRUE(b.empty(Side::Ask));
  EXPECT_FALSE(trade_print({}));
}

TEST(OrderBook, CancelBehaviour) {
  OrderBook b;
  const auto best = b.submit_limit(Side::Bid, 100, 5, 0.0).id;
  const auto a = b.submit_limit(Side::Bid, 99, 1, 0.0).id;
  const auto mid = b.submit_limit(Side::Bid, 99, 2, 0.0).id;
  const auto c = b.submit_limit(Side::Bid, 99, 3, 0.0).id;
  EXPECT_EQ(b.cancel(best), 5);
  EXPECT_EQ(b.best_bid(), 99);
  EXPECT_EQ(b.cancel(mid), 2);
  std::vector<OrderId> order;
  b.for_each_order([&](const Order& o) { order.push_back(o.id); });
  EXPECT_EQ(order, (std::vector<OrderId>{a, c}));
  EXPECT_THROW(b.cancel(mid), std::out_of_range);
  EXPECT_THROW(b.cancel(999), std::out_of_range);
}

TEST(OrderBook, SpreadAndMid) {
  OrderBook b;
  EXPECT_THROW((void)b.spread(), std::logic_error);
  b.submit_limit(Side::Bid, 100, 1, 0.0);
  EXPECT_THROW((void)b.spread(), std::logic_error);
  EXPECT_THROW((void)b.mid(), std::logic_error);
  b.submit_limit(Side::Ask, 101, 1, 0.0);
  EXPECT_EQ(b.spread(), 1);
  EXPECT_DOUBLE_EQ(b.mid(), 100.5);
  EXPECT_EQ(b.mid_half_ticks(), 201);
  b.submit_market(Side::Bid, 1, 0.0);
  b.submit_limit(Side::Ask, 105, 1, 0.0);
  EXPECT_EQ(b.spread(), 5);
  EXPECT_DOUBLE_EQ(b.mid(), 102.5);
}

TEST(OrderBook, RejectsInvalidOrders) {
  OrderBook b;
  EXPECT_THROW(b.submit_limit(Side::Bid, 0, 1, 0.0), std::invalid_argument);
  EXPECT_THROW(b.submit_limit(Side::Bid, 10, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(b.submit_limit(Side::Bid, 10, -3, 0.0), std::invalid_argument);
  b.submit_limit(Side::Ask, 10, 1, 0.0);
  EXPECT_THROW(b.submit_market(Side::Bid, 0, 0.0), std::invalid_argument);
  EXPECT_EQ(b.next_id(), 2u);
}

TEST(OrderBook, SnapshotTopFive) {
  OrderBook b;
  for (Price p = 90; p <= 100; ++p) b.submit_limit(Side::Bid, p, p, 0.0);
  b.submit_limit(Side::Ask, 102, 7, 0.0);
  b.submit_limit(Side::Ask, 102, 3, 0.0);
  const auto s = b.snapshot(1234, TradePrint{101, 4});
  EXPECT_EQ(s.ts_ms, 1234);
  ASSERT_EQ(s.bids.size(), 5u);
  EXPECT_EQ(s.bids[0].price, 100);
  EXPECT_EQ(s.bids[4].price, 96);
  ASSERT_EQ(s.asks.size(), 1u);
  EXPECT_EQ(s.asks[0].quantity, 10);
  ASSERT_TRUE(s.trade);
  EXPECT_EQ(s.trade->quantity, 4);
}

TEST(OrderBook, OrderAtCoversEveryRestingOrder) {
  OrderBook b;
  std::mt19937_64 rng(1);
  std::vector<OrderId> ids;
  for (int i = 0; i < 50; ++i) ids.push_back(b.submit_limit(Side::Bid, 50 + rng() % 10, 1 + rng() % 5, 0.0).id);
  for (int i = 0; i < 20; ++i) b.cancel(ids[i * 2]);
  b.submit_limit(Side::Ask, 55, 7, 0.0);  // crosses and fills some bids
  std::set<OrderId> seen;
  for (std::size_t i = 0; i < b.order_count(); ++i) seen.insert(b.order_at(i).id);
  std::set<OrderId> expected;
  b.for_each_order([&](const Order& o) { expected.insert(o.id); });
  EXPECT_EQ(seen, expected);
  EXPECT_THROW((void)b.order_at(b.order_count()), std::out_of_range);
}

TEST(OrderBook, RandomOperationsKeepInvariants) {
  OrderBook b;
  std::mt19937_64 rng(2024);
  std::vector<OrderId> live;
  Volume in = 0, traded_resting = 0, traded_entry = 0, cancelled = 0;
  for (int step = 0; step < 50000; ++step) {
    const int op = static_cast<int>(rng() % 10);
    if (op < 6) {
      const Side s = rng() % 2 ? Side::Bid : Side::Ask;
      const Price p = 1000 + static_cast<Price>(rng() % 21) - 10;
      const Volume v = 1 + static_cast<Volume>(rng() % 50);
      const auto r = b.submit_limit(s, p, v, step);
      in += v;
      for (const auto& t : r.trades) traded_entry += t.volume;
      if (r.resting) live.push_back(r.id);
    } else if (op < 8) {
      const Side s = rng() % 2 ? Side::Bid : Side::Ask;
      if (b.empty(opposite(s))) continue;
      Price last = s == Side::Bid ? 0 : 1 << 30;
      for (const auto& t : b.submit_market(s, 1 + static_cast<Volume>(rng() % 80), step)) {
        EXPECT_TRUE(s == Side::Bid ? t.price >= last : t.price <= last);
        last = t.price;
        traded_resting += t.volume;
      }
    } else if (!live.empty()) {
      const std::size_t k = rng() % live.size();
      if (b.contains(live[k])) cancelled += b.cancel(live[k]);
      live[k] = live.back();
      live.pop_back();
    }
    if (b.best_bid() && b.best_ask()) ASSERT_LT(*b.best_bid(), *b.best_ask());
  }
  Volume resting = 0;
  b.for_each_order([&](const Order& o) {
    EXPECT_GT(o.volume, 0);
    resting += o.volume;
  });
  EXPECT_EQ(resting, b.resting_volume());
  // Crossing limits trade on entry: those fills count against both the maker and the taker.
  EXPECT_EQ(in, 2 * traded_entry + traded_resting + cancelled + resting);
  const auto& l = b.ledger();
  EXPECT_EQ(l.submitted_limit, in);
  EXPECT_EQ(l.cancelled, cancelled);
  EXPECT_EQ(l.filled_on_entry, traded_entry);
  EXPECT_EQ(l.submitted_limit, l.filled_resting + l.filled_on_entry + l.cancelled + resting);
}

TEST(OrderBook, DeterministicReplay) {
  auto run = [] {
    OrderBook b;
    std::mt19937_64 rng(5);
    std::ostringstream log;
    for (int i = 0; i < 2000; ++i) {
      const Side s = rng() % 2 ? Side::Bid : Side::Ask;
      const auto r = b.submit_limit(s, 100 + static_cast<Price>(rng() % 9) - 4, 1 + rng() % 9, i);
      for (const auto& t : r.trades) log << t.price << ':' << t.volume << ':' << t.maker_id << ';';
    }
    return log.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(OrderBook, TradesCsv) {
  std::ostringstream os;
  write_trades_csv(os, {Trade{1.5, 101, 7, Side::Bid, 3}});
  EXPECT_EQ(os.str(), "t,side,price_ticks,volume\n1.500000,B,101,7\n");
}
