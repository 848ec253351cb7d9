#include "hlob/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "csv_fields.hpp"
#include "hlob/errors.hpp"

namespace hlob {

namespace {

constexpr std::string_view kHeader =
    "ts_ms,bid_px_1,bid_qty_1,bid_px_2,bid_qty_2,bid_px_3,bid_qty_3,bid_px_4,bid_qty_4,"
    "bid_px_5,bid_qty_5,ask_px_1,ask_qty_1,ask_px_2,ask_qty_2,ask_px_3,ask_qty_3,ask_px_4,"
    "ask_qty_4,ask_px_5,ask_qty_5,trade_px,trade_qty";
constexpr std::size_t kColumns = 1 + 4 * kSnapshotDepth + 2;

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::optional<std::int64_t> parse_int(std::string_view field, std::size_t lineno, const char* what) {
  if (field.empty()) return std::nullopt;
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw DataError(fmt::format("unparsable {} '{}'", what, field), lineno);
  return value;
}

std::vector<PriceLevel> parse_levels(const std::vector<std::string_view>& f, std::size_t first,
                                     Side side, std::size_t lineno) {
  std::vector<PriceLevel> levels;
  bool gap = false;
  for (std::size_t k = 0; k < kSnapshotDepth; ++k) {
    const auto px = parse_int(f[first + 2 * k], lineno, "price");
    const auto qty = parse_int(f[first + 2 * k + 1], lineno, "quantity");
    if (!px && !qty) {
      gap = true;
      continue;
    }
    const char* name = side == Side::Bid ? "bid" : "ask";
    if (!px || !qty)
      throw DataError(fmt::format("{} level {} has price without quantity or vice versa", name, k + 1),
                      lineno);
    if (gap) throw DataError(fmt::format("{} level {} follows an empty level", name, k + 1), lineno);
    if (*qty <= 0) throw DataError(fmt::format("{} level {} quantity must be > 0", name, k + 1), lineno);
    if (!levels.empty()) {
      const bool ordered = side == Side::Bid ? *px < levels.back().price : *px > levels.back().price;
      if (!ordered)
        throw DataError(fmt::format("{} levels not strictly price-ordered at level {}", name, k + 1),
                        lineno);
    }
    levels.push_back({*px, *qty});
  }
  return levels;
}

void write_levels(std::ostream& os, const std::vector<PriceLevel>& levels) {
  for (std::size_t k = 0; k < kSnapshotDepth; ++k) {
    if (k < levels.size())
      os << ',' << levels[k].price << ',' << levels[k].quantity;
    else
      os << ",,";
  }
}

bool better(Side side, Price a, Price b) { return side == Side::Bid ? a > b : a < b; }

// Diffs one side of the book and appends inferred limit/cancel orders.
// `trade_left` is the trade volume not yet matched against visible decreases.
void diff_side(const std::vector<PriceLevel>& prev, const std::vector<PriceLevel>& cur, Side side,
               std::int64_t ts, const std::optional<TradePrint>& trade, bool consumed,
               Volume& trade_left, ReconstructionDiagnostics& diag,
               std::vector<ReconstructedOrder>& out) {
  std::map<Price, std::pair<Volume, Volume>> quantities;
  for (const auto& l : prev) quantities[l.price].first = l.quantity;
  for (const auto& l : cur) quantities[l.price].second = l.quantity;

  std::vector<Price> prices;
  for (const auto& [p, q] : quantities) prices.push_back(p);
  if (side == Side::Bid) std::reverse(prices.begin(), prices.end());

  const bool prev_full = prev.size() == kSnapshotDepth;
  const bool cur_full = cur.size() == kSnapshotDepth;
  for (const Price p : prices) {
    const auto [before, after] = quantities[p];
    if (before == 0 && prev_full && better(side, prev.back().price, p)) ++diag.window_entries;
    if (after == 0 && cur_full && better(side, cur.back().price, p)) {
      ++diag.window_exits;
      continue;
    }
    if (after > before) {
      out.push_back({ts, OrderKind::Limit, side, p, after - before});
    } else if (after < before) {
      Volume decrease = before - after;
      if (consumed && trade && !better(side, trade->price, p)) {
        const Volume absorbed = std::min(decrease, trade_left);
        trade_left -= absorbed;
        decrease -= absorbed;
      }
      if (decrease > 0) out.push_back({ts, OrderKind::Cancel, side, p, decrease});
    }
  }
}

Volume visible_volume(const std::vector<PriceLevel>& levels) {
  Volume v = 0;
  for (const auto& l : levels) v += l.quantity;
  return v;
}

}  // namespace

std::string_view snapshot_header() { return kHeader; }

void write_snapshot_header(std::ostream& os) { os << kHeader << '\n'; }

void write_snapshot(std::ostream& os, const Snapshot& snap) {
  os << snap.ts_ms;
  write_levels(os, snap.bids);
  write_levels(os, snap.asks);
  if (snap.trade)
    os << ',' << snap.trade->price << ',' << snap.trade->quantity << '\n';
  else
    os << ",,\n";
}

std::vector<Snapshot> parse_snapshots(std::istream& is) {
  std::vector<Snapshot> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != kHeader) throw DataError("snapshot header mismatch", lineno);
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kColumns)
      throw DataError(fmt::format("expected {} columns, found {}", kColumns, f.size()), lineno);
    Snapshot snap;
    const auto ts = parse_int(f[0], lineno, "ts_ms");
    if (!ts) throw DataError("missing ts_ms", lineno);
    snap.ts_ms = *ts;
    snap.bids = parse_levels(f, 1, Side::Bid, lineno);
    snap.asks = parse_levels(f, 1 + 2 * kSnapshotDepth, Side::Ask, lineno);
    const auto tpx = parse_int(f[kColumns - 2], lineno, "trade_px");
    const auto tqty = parse_int(f[kColumns - 1], lineno, "trade_qty");
    if (tpx.has_value() != tqty.has_value())
      throw DataError("trade price and quantity must both be present or both empty", lineno);
    if (tpx) {
      if (*tqty <= 0) throw DataError("trade quantity must be > 0", lineno);
      snap.trade = TradePrint{*tpx, *tqty};
    }
    if (!out.empty() && snap.ts_ms < out.back().ts_ms)
      throw DataError(fmt::format("timestamp {} precedes previous row's {}", snap.ts_ms,
                                  out.back().ts_ms),
                      lineno);
    out.push_back(std::move(snap));
  }
  if (!header) throw DataError("missing snapshot header");
  return out;
}

std::vector<Snapshot> parse_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  try {
    return parse_snapshots(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

Reconstruction reconstruct(std::span<const Snapshot> snapshots) {
  Reconstruction r;
  std::vector<ReconstructedOrder> raw;
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    const Snapshot& prev = snapshots[i - 1];
    const Snapshot& cur = snapshots[i];
    const auto& trade = cur.trade;
    Volume trade_left = 0;
    Side consumed = Side::Ask;
    if (trade) {
      Side aggressor;
      if (!prev.asks.empty() && trade->price >= prev.asks.front().price) {
        aggressor = Side::Bid;
      } else if (!prev.bids.empty() && trade->price <= prev.bids.front().price) {
        aggressor = Side::Ask;
      } else {
        ++r.diagnostics.ambiguous_side;
        const Volume ask_drop = visible_volume(prev.asks) - visible_volume(cur.asks);
        const Volume bid_drop = visible_volume(prev.bids) - visible_volume(cur.bids);
        aggressor = ask_drop >= bid_drop ? Side::Bid : Side::Ask;
      }
      consumed = opposite(aggressor);
      trade_left = trade->quantity;
      raw.push_back({cur.ts_ms, OrderKind::Market, aggressor, trade->price, trade->quantity});
    }
    diff_side(prev.bids, cur.bids, Side::Bid, cur.ts_ms, trade, consumed == Side::Bid, trade_left,
              r.diagnostics, raw);
    diff_side(prev.asks, cur.asks, Side::Ask, cur.ts_ms, trade, consumed == Side::Ask, trade_left,
              r.diagnostics, raw);
    if (trade && trade_left > 0) ++r.diagnostics.unexplained_trade;
  }
  r.orders = merge_same_timestamp(raw);
  return r;
}

std::vector<ReconstructedOrder> merge_same_timestamp(std::span<const ReconstructedOrder> orders) {
  std::vector<ReconstructedOrder> out;
  std::size_t group_start = 0;
  for (const auto& o : orders) {
    if (!out.empty() && out.back().ts_ms != o.ts_ms) group_start = out.size();
    auto same = std::find_if(out.begin() + static_cast<std::ptrdiff_t>(group_start), out.end(),
                             [&](const ReconstructedOrder& m) {
                               return m.ts_ms == o.ts_ms && m.kind == o.kind && m.side == o.side;
                             });
    if (same != out.end())
      same->volume += o.volume;
    else
      out.push_back(o);
  }
  return out;
}

void write_orders_csv(std::ostream& os, std::span<const ReconstructedOrder> orders) {
  os << "ts_ms,kind,side,price_ticks,volume\n";
  for (const auto& o : orders)
    os << o.ts_ms << ',' << kind_code(o.kind) << ',' << side_code(o.side) << ',' << o.price << ','
       << o.volume << '\n';
}

std::vector<ReconstructedOrder> read_orders_csv(std::istream& is) {
  std::vector<ReconstructedOrder> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "ts_ms,kind,side,price_ticks,volume")
        throw DataError("expected header 'ts_ms,kind,side,price_ticks,volume'", lineno);
      header = true;
      continue;
    }
    const auto f = detail::split_fields(line);
    if (f.size() != 5) throw DataError(fmt::format("expected 5 fields, got {}", f.size()), lineno);
    ReconstructedOrder o;
    o.ts_ms = detail::parse_int<std::int64_t>(f[0], "timestamp", lineno);
    o.kind = detail::parse_kind(f[1], lineno);
    o.side = detail::parse_side(f[2], lineno);
    o.price = detail::parse_int<Price>(f[3], "price", lineno);
    o.volume = detail::parse_int<Volume>(f[4], "volume", lineno);
    if (!out.empty() && o.ts_ms < out.back().ts_ms) throw DataError("timestamps not ordered", lineno);
    out.push_back(o);
  }
  if (!header) throw DataError("missing header");
  return out;
}

std::vector<FlowEvent> to_flow_events(std::span<const ReconstructedOrder> orders) {
  std::vector<FlowEvent> out;
  out.reserve(orders.size());
  for (const auto& o : orders) out.push_back({static_cast<double>(o.ts_ms) / 1000.0, o.kind, o.side});
  return out;
}

Pairing parse_pairing(std::string_view name) {
  for (Pairing p : {Pairing::AllEvents, Pairing::MarketNextLimit, Pairing::LimitNextMarket,
                    Pairing::MarketNextLimitSameSide, Pairing::MarketNextLimitOppositeSide})
    if (pairing_name(p) == name) return p;
  throw std::invalid_argument(fmt::format("unknown pairing '{}'", name));
}

std::string_view pairing_name(Pairing pairing) {
  switch (pairing) {
    case Pairing::AllEvents: return "all-events";
    case Pairing::MarketNextLimit: return "market-next-limit";
    case Pairing::LimitNextMarket: return "limit-next-market";
    case Pairing::MarketNextLimitSameSide: return "market-next-limit-same-side";
    case Pairing::MarketNextLimitOppositeSide: return "market-next-limit-opposite-side";
  }
  return "";
}

std::vector<double> extract_durations(std::span<const FlowEvent> events, Pairing pairing) {
  std::vector<double> out;
  const FlowEvent* prev = nullptr;
  for (const auto& e : events) {
    if (e.kind == OrderKind::Cancel) continue;
    if (prev) {
      if (e.t < prev->t) throw std::invalid_argument("flow events not time-ordered");
      const double gap = e.t - prev->t;
      const bool m_then_l = prev->kind == OrderKind::Market && e.kind == OrderKind::Limit;
      switch (pairing) {
        case Pairing::AllEvents: out.push_back(gap); break;
        case Pairing::MarketNextLimit:
          if (m_then_l) out.push_back(gap);
          break;
        case Pairing::LimitNextMarket:
          if (prev->kind == OrderKind::Limit && e.kind == OrderKind::Market) out.push_back(gap);
          break;
        case Pairing::MarketNextLimitSameSide:
          if (m_then_l && prev->side == e.side) out.push_back(gap);
          break;
        case Pairing::MarketNextLimitOppositeSide:
          if (m_then_l && prev->side != e.side) out.push_back(gap);
          break;
      }
    }
    prev = &e;
  }
  return out;
}

}  // namespace hlob
