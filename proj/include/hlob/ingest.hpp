#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hlob/types.hpp"

namespace hlob {

/// Order inferred from two consecutive snapshots. For market orders `side`
/// is the aggressor (Bid = buyer lifting the asks) and `price` the last
/// execution price.
struct ReconstructedOrder {
  std::int64_t ts_ms{0};
  OrderKind kind{OrderKind::Limit};
  Side side{Side::Bid};
  Price price{0};
  Volume volume{0};

  friend bool operator==(const ReconstructedOrder&, const ReconstructedOrder&) = default;
};

/// Counts of transitions the diffing rules cannot explain unambiguously.
struct ReconstructionDiagnostics {
  std::size_t window_entries{0};   // price appeared from beyond the visible depth
  std::size_t window_exits{0};     // price scrolled beyond the visible depth
  std::size_t unexplained_trade{0};  // trade volume larger than the visible decrease
  std::size_t ambiguous_side{0};   // trade price inside the previous spread

  friend bool operator==(const ReconstructionDiagnostics&,
                         const ReconstructionDiagnostics&) = default;
};

struct Reconstruction {
  std::vector<ReconstructedOrder> orders;
  ReconstructionDiagnostics diagnostics;
};

/// Snapshot CSV header (bit-exact).
std::string_view snapshot_header();
void write_snapshot_header(std::ostream& os);
void write_snapshot(std::ostream& os, const Snapshot& snap);

/// Throws DataError naming the offending line for malformed rows or
/// decreasing timestamps.
std::vector<Snapshot> parse_snapshots(std::istream& is);
std::vector<Snapshot> parse_snapshots(const std::filesystem::path& path);

/// Diffs consecutive snapshots: a reported trade is a market order, a
/// quantity increase a limit order, a decrease not absorbed by the trade a
/// cancellation. Orders of the same kind and side sharing a millisecond are
/// merged into one with the summed volume and the first one's price.
Reconstruction reconstruct(std::span<const Snapshot> snapshots);

/// Merges same-timestamp, same-kind, same-side orders (stable, first price kept).
std::vector<ReconstructedOrder> merge_same_timestamp(std::span<const ReconstructedOrder> orders);

void write_orders_csv(std::ostream& os, std::span<const ReconstructedOrder> orders);
std::vector<ReconstructedOrder> read_orders_csv(std::istream& is);

/// An order-flow event on the seconds clock, the common input of duration
/// statistics for reconstructed and simulated flows.
struct FlowEvent {
  double t{0.0};
  OrderKind kind{OrderKind::Limit};
  Side side{Side::Bid};
};

std::vector<FlowEvent> to_flow_events(std::span<const ReconstructedOrder> orders);

enum class Pairing {
  AllEvents,
  MarketNextLimit,
  LimitNextMarket,
  MarketNextLimitSameSide,
  MarketNextLimitOppositeSide,
};

/// Accepts all-events, market-next-limit, limit-next-market,
/// market-next-limit-same-side, market-next-limit-opposite-side.
Pairing parse_pairing(std::string_view name);
std::string_view pairing_name(Pairing pairing);

/// Durations in seconds on the clock of limit and market orders
/// (cancellations removed). AllEvents gives every gap between consecutive
/// events; the directed pairings give the gap of each consecutive pair whose
/// first event is a market (limit) order and whose second is a limit (market)
/// order, optionally restricted to equal or opposite side labels.
std::vector<double> extract_durations(std::span<const FlowEvent> events, Pairing pairing);

}  // namespace hlob
