#include <sstream>

#include <gtest/gtest.h>

#include "hlob/errors.hpp"
#include "hlob/ingest.hpp"
#include "support/top_five_sequences.hpp"

using namespace hlob;

namespace {

std::size_t error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    parse_snapshots(is);
  } catch (const DataError& e) {
    return e.line();
  }
  return 0;
}

std::string header() { return std::string(snapshot_header()) + "\n"; }

Snapshot snap(std::int64_t ts, std::vector<PriceLevel> bids, std::vector<PriceLevel> asks,
              std::optional<TradePrint> trade = std::nullopt) {
  return Snapshot{ts, std::move(bids), std::move(asks), trade};
}

std::vector<ReconstructedOrder> orders_of(const std::vector<Snapshot>& s) {
  return reconstruct(s).orders;
}

}  // namespace

TEST(Snapshots, HeaderIsBitExact) {
  EXPECT_EQ(snapshot_header().substr(0, 36), "ts_ms,bid_px_1,bid_qty_1,bid_px_2,bi");
  EXPECT_TRUE(snapshot_header().ends_with("ask_px_5,ask_qty_5,trade_px,trade_qty"));
}

TEST(Snapshots, HeaderOnlyIsEmpty) {
  std::istringstream is(header());
  EXPECT_TRUE(parse_snapshots(is).empty());
}

TEST(Snapshots, TradeFieldsGiveTrade) {
  std::istringstream is(header() + "15,100,7,,,,,,,,,101,3,,,,,,,,,101,4\n");
  const auto s = parse_snapshots(is);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].ts_ms, 15);
  ASSERT_TRUE(s[0].trade);
  EXPECT_EQ(*s[0].trade, (TradePrint{101, 4}));
  EXPECT_EQ(s[0].bids, (std::vector<PriceLevel>{{100, 7}}));
}

TEST(Snapshots, ErrorsNameTheLine) {
  const std::string row1 = "20,100,7,,,,,,,,,101,3,,,,,,,,,,\n";
  const std::string row0 = "10,100,7,,,,,,,,,101,3,,,,,,,,,,\n";
  EXPECT_EQ(error_line(header() + row1 + row0), 3u);
  EXPECT_EQ(error_line("ts_ms,foo\n"), 1u);
  EXPECT_EQ(error_line(header() + "10,100,7\n"), 2u);
  EXPECT_EQ(error_line(header() + "10,100,,,,,,,,,,101,3,,,,,,,,,,\n"), 2u);
  EXPECT_EQ(error_line(header() + "10,,,99,5,,,,,,,101,3,,,,,,,,,,\n"), 2u);
  EXPECT_EQ(error_line(header() + "10,99,7,100,5,,,,,,,101,3,,,,,,,,,,\n"), 2u);
  EXPECT_EQ(error_line(header() + "10,100,0,,,,,,,,,101,3,,,,,,,,,,\n"), 2u);
  EXPECT_EQ(error_line(header() + "10,100,7,,,,,,,,,101,3,,,,,,,,,101,\n"), 2u);
  EXPECT_EQ(error_line(header() + "x,100,7,,,,,,,,,101,3,,,,,,,,,,\n"), 2u);
  std::istringstream empty("");
  EXPECT_THROW(parse_snapshots(empty), DataError);
  EXPECT_THROW(parse_snapshots(std::filesystem::path("/nonexistent/snapshots.csv")), DataError);
}

TEST(Snapshots, WriteParseRoundTripIsBitExact) {
  const auto c = test_support::random_top_five_case(3, 200);
  std::ostringstream os;
  write_snapshot_header(os);
  for (const auto& s : c.snapshots) write_snapshot(os, s);
  std::istringstream is(os.str());
  const auto parsed = parse_snapshots(is);
  EXPECT_EQ(parsed, c.snapshots);
  std::ostringstream again;
  write_snapshot_header(again);
  for (const auto& s : parsed) write_snapshot(again, s);
  EXPECT_EQ(again.str(), os.str());
}

TEST(Reconstruct, TradeIsMarketOrder) {
  const auto o = orders_of({snap(0, {{100, 10}}, {{101, 5}, {102, 7}}),
                            snap(1, {{100, 10}}, {{102, 3}}, TradePrint{102, 9})});
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0], (ReconstructedOrder{1, OrderKind::Market, Side::Bid, 102, 9}));
}

TEST(Reconstruct, IncreaseIsLimitOrder) {
  const auto o = orders_of({snap(0, {{100, 10}}, {{101, 100}}), snap(4, {{100, 10}}, {{101, 150}})});
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0], (ReconstructedOrder{4, OrderKind::Limit, Side::Ask, 101, 50}));
}

TEST(Reconstruct, DecreaseWithoutTradeIsCancellation) {
  const auto o = orders_of({snap(0, {{100, 80}}, {{101, 5}}), snap(4, {{100, 30}}, {{101, 5}})});
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0], (ReconstructedOrder{4, OrderKind::Cancel, Side::Bid, 100, 50}));
}

TEST(Reconstruct, SameMillisecondOrdersMerge) {
  const auto o = orders_of({snap(0, {{100, 10}}, {{101, 5}}), snap(7, {{100, 30}}, {{101, 5}}),
                            snap(7, {{100, 60}}, {{101, 5}})});
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0], (ReconstructedOrder{7, OrderKind::Limit, Side::Bid, 100, 50}));
}

TEST(Reconstruct, MergeKeepsFirstPriceAndSeparatesKindsAndSides) {
  const std::vector<ReconstructedOrder> raw{{5, OrderKind::Limit, Side::Bid, 99, 10},
                                            {5, OrderKind::Limit, Side::Ask, 103, 1},
                                            {5, OrderKind::Limit, Side::Bid, 97, 20},
                                            {5, OrderKind::Cancel, Side::Bid, 99, 4},
                                            {6, OrderKind::Limit, Side::Bid, 99, 3}};
  const auto m = merge_same_timestamp(raw);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0], (ReconstructedOrder{5, OrderKind::Limit, Side::Bid, 99, 30}));
  EXPECT_EQ(m[1].side, Side::Ask);
  EXPECT_EQ(m[2].kind, OrderKind::Cancel);
  EXPECT_EQ(m[3].ts_ms, 6);
}

TEST(Reconstruct, TradeAbsorbsDecreaseFirst) {
  const auto o = orders_of({snap(0, {{100, 40}}, {{101, 5}}), snap(2, {{100, 10}}, {{101, 5}}, TradePrint{100, 12})});
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[0], (ReconstructedOrder{2, OrderKind::Market, Side::Ask, 100, 12}));
  EXPECT_EQ(o[1], (ReconstructedOrder{2, OrderKind::Cancel, Side::Bid, 100, 18}));
}

TEST(Reconstruct, WindowEntriesAndExitsAreDiagnosedNotCancelled) {
  const std::vector<PriceLevel> full{{100, 1}, {99, 1}, {98, 1}, {97, 1}, {96, 1}};
  // 100 cancelled, 95 scrolls into view.
  auto r = reconstruct(std::vector<Snapshot>{
      snap(0, full, {{101, 1}}), snap(1, {{99, 1}, {98, 1}, {97, 1}, {96, 1}, {95, 4}}, {{101, 1}})});
  EXPECT_EQ(r.diagnostics.window_entries, 1u);
  ASSERT_EQ(r.orders.size(), 2u);
  EXPECT_EQ(r.orders[0].kind, OrderKind::Cancel);
  EXPECT_EQ(r.orders[1], (ReconstructedOrder{1, OrderKind::Limit, Side::Bid, 95, 4}));
  // A better bid pushes 96 out of the window.
  r = reconstruct(std::vector<Snapshot>{
      snap(0, full, {{102, 1}}), snap(1, {{101, 2}, {100, 1}, {99, 1}, {98, 1}, {97, 1}}, {{102, 1}})});
  EXPECT_EQ(r.diagnostics.window_exits, 1u);
  ASSERT_EQ(r.orders.size(), 1u);
  EXPECT_EQ(r.orders[0], (ReconstructedOrder{1, OrderKind::Limit, Side::Bid, 101, 2}));
}

TEST(Reconstruct, AmbiguousAndUnexplainedTrades) {
  auto r = reconstruct(std::vector<Snapshot>{snap(0, {{100, 5}}, {{102, 5}}),
                                             snap(1, {{100, 5}}, {{102, 2}}, TradePrint{101, 3})});
  EXPECT_EQ(r.diagnostics.ambiguous_side, 1u);
  ASSERT_FALSE(r.orders.empty());
  EXPECT_EQ(r.orders[0].side, Side::Bid);
  r = reconstruct(std::vector<Snapshot>{snap(0, {{100, 5}}, {{101, 5}}),
                                        snap(1, {{100, 5}}, {{101, 3}}, TradePrint{101, 9})});
  EXPECT_EQ(r.diagnostics.unexplained_trade, 1u);
}

TEST(Reconstruct, RandomTopFiveSequencesRoundTrip) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto c = test_support::random_top_five_case(seed, 60);
    const auto r = reconstruct(c.snapshots);
    ASSERT_EQ(r.orders, merge_same_timestamp(c.orders)) << "seed " << seed;
    EXPECT_EQ(r.diagnostics, ReconstructionDiagnostics{});
  }
}

TEST(OrdersCsv, RoundTripAndErrors) {
  const std::vector<ReconstructedOrder> o{{0, OrderKind::Market, Side::Bid, 101, 9},
                                          {3, OrderKind::Cancel, Side::Ask, 104, 2}};
  std::stringstream ss;
  write_orders_csv(ss, o);
  EXPECT_EQ(ss.str(), "ts_ms,kind,side,price_ticks,volume\n0,M,B,101,9\n3,C,A,104,2\n");
  EXPECT_EQ(read_orders_csv(ss), o);
  std::istringstream bad("ts_ms,kind,side,price_ticks,volume\n5,L,B,1,1\n4,L,B,1,1\n");
  try {
    read_orders_csv(bad);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Durations, Examples) {
  const std::vector<FlowEvent> ev{{0.0, OrderKind::Market, Side::Bid},
                                  {0.1, OrderKind::Limit, Side::Bid},
                                  {0.3, OrderKind::Cancel, Side::Ask},
                                  {0.5, OrderKind::Limit, Side::Ask}};
  const auto all = extract_durations(ev, Pairing::AllEvents);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_NEAR(all[0], 0.1, 1e-12);
  EXPECT_NEAR(all[1], 0.4, 1e-12);
  const auto mnl = extract_durations(ev, Pairing::MarketNextLimit);
  ASSERT_EQ(mnl.size(), 1u);
  EXPECT_NEAR(mnl[0], 0.1, 1e-12);
  EXPECT_TRUE(extract_durations(ev, Pairing::LimitNextMarket).empty());

  const std::vector<FlowEvent> limits{{0.0, OrderKind::Limit, Side::Bid}, {1.0, OrderKind::Limit, Side::Bid}};
  EXPECT_TRUE(extract_durations(limits, Pairing::MarketNextLimit).empty());

  const std::vector<FlowEvent> cross{{0.0, OrderKind::Market, Side::Bid}, {0.2, OrderKind::Limit, Side::Ask}};
  EXPECT_TRUE(extract_durations(cross, Pairing::MarketNextLimitSameSide).empty());
  EXPECT_EQ(extract_durations(cross, Pairing::MarketNextLimitOppositeSide).size(), 1u);

  const std::vector<FlowEvent> unordered{{1.0, OrderKind::Limit, Side::Bid}, {0.5, OrderKind::Limit, Side::Bid}};
  EXPECT_THROW(extract_durations(unordered, Pairing::AllEvents), std::invalid_argument);
}

TEST(Durations, CountsMatchPairingDefinition) {
  std::mt19937_64 rng(4);
  std::vector<FlowEvent> ev;
  double t = 0.0;
  for (int i = 0; i < 5000; ++i) {
    t += std::exponential_distribution<double>(1.0)(rng);
    const auto k = rng() % 3;
    ev.push_back({t, k == 0 ? OrderKind::Market : k == 1 ? OrderKind::Limit : OrderKind::Cancel,
                  rng() % 2 ? Side::Bid : Side::Ask});
  }
  std::vector<FlowEvent> flow;
  for (const auto& e : ev)
    if (e.kind != OrderKind::Cancel) flow.push_back(e);
  std::size_t ml = 0, lm = 0, same = 0;
  for (std::size_t i = 1; i < flow.size(); ++i) {
    const bool m_l = flow[i - 1].kind == OrderKind::Market && flow[i].kind == OrderKind::Limit;
    ml += m_l;
    same += m_l && flow[i - 1].side == flow[i].side;
    lm += flow[i - 1].kind == OrderKind::Limit && flow[i].kind == OrderKind::Market;
  }
  EXPECT_EQ(extract_durations(ev, Pairing::AllEvents).size(), flow.size() - 1);
  EXPECT_EQ(extract_durations(ev, Pairing::MarketNextLimit).size(), ml);
  EXPECT_EQ(extract_durations(ev, Pairing::LimitNextMarket).size(), lm);
  EXPECT_EQ(extract_durations(ev, Pairing::MarketNextLimitSameSide).size(), same);
  EXPECT_EQ(extract_durations(ev, Pairing::MarketNextLimitOppositeSide).size(), ml - same);
  for (double d : extract_durations(ev, Pairing::AllEvents)) EXPECT_GE(d, 0.0);
}

TEST(Durations, PairingNamesAndMillisecondClock) {
  for (Pairing p : {Pairing::AllEvents, Pairing::MarketNextLimit, Pairing::LimitNextMarket,
                    Pairing::MarketNextLimitSameSide, Pairing::MarketNextLimitOppositeSide})
    EXPECT_EQ(parse_pairing(pairing_name(p)), p);
  EXPECT_THROW(parse_pairing("market->limit"), std::invalid_argument);
  const std::vector<ReconstructedOrder> o{{1500, OrderKind::Market, Side::Ask, 1, 1}};
  EXPECT_DOUBLE_EQ(to_flow_events(o)[0].t, 1.5);
}
