#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hlob {

using Price = std::int64_t;   // ticks
using Volume = std::int64_t;  // units
using OrderId = std::uint64_t;

enum class Side : std::uint8_t { Bid, Ask };

constexpr Side opposite(Side s) { return s == Side::Bid ? Side::Ask : Side::Bid; }
constexpr char side_code(Side s) { return s == Side::Bid ? 'B' : 'A'; }

enum class OrderKind : std::uint8_t { Limit, Market, Cancel };

constexpr char kind_code(OrderKind k) {
  return k == OrderKind::Limit ? 'L' : k == OrderKind::Market ? 'M' : 'C';
}

/// A value observed at a time, e.g. one point of a spread or mid-price series.
struct TimedValue {
  double t{0.0};
  double value{0.0};
};

struct PriceLevel {
  Price price{0};
  Volume quantity{0};

  friend bool operator==(const PriceLevel&, const PriceLevel&) = default;
};

struct TradePrint {
  Price price{0};
  Volume quantity{0};

  friend bool operator==(const TradePrint&, const TradePrint&) = default;
};

inline constexpr std::size_t kSnapshotDepth = 5;

/// Top of book at one instant: up to five levels per side, best first,
/// plus the transaction reported with this update, if any.
struct Snapshot {
  std::int64_t ts_ms{0};
  std::vector<PriceLevel> bids;
  std::vector<PriceLevel> asks;
  std::optional<TradePrint> trade;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

}  // namespace hlob
