#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "hlob/hawkes.hpp"
#include "hlob/ingest.hpp"
#include "hlob/order_book.hpp"
#include "hlob/rng.hpp"
#include "hlob/types.hpp"

namespace hlob {

/// The six order-flow models, named after the excitation effects they switch on.
enum class Variant { HP, LM, MM, MM_LL, MM_LM, MM_LL_LM };

inline constexpr std::array<Variant, 6> kAllVariants{Variant::HP,    Variant::LM,    Variant::MM,
                                                     Variant::MM_LL, Variant::MM_LM, Variant::MM_LL_LM};

std::string_view variant_name(Variant v);
/// Accepts the canonical names (HP, LM, MM, MM+LL, MM+LM, MM+LL+LM) and
/// spaces or underscores in place of '+'.
Variant parse_variant(std::string_view name);
/// Calibrated order-flow parameters of each variant.
HawkesModelSpec preset_spec(Variant v);

enum class CancellationRule {
  /// Each resting order is deleted independently with probability delta.
  IndependentThinning,
  /// With probability delta, one uniformly chosen resting order is deleted.
  SingleRandomOrder,
};

struct AgentParams {
  double m_p1{2.7};   // placement shift, ticks
  double nu_p1{2.0};  // placement degrees of freedom
  double s_p1{0.9};   // placement scale, ticks
  double m_v1{275.0};  // mean limit volume
  double m_v2{380.0};  // mean market volume
  double lambda_c{1.35};  // cancellation events per second
  double delta{0.015};    // cancellation probability, see CancellationRule
  CancellationRule cancellation{CancellationRule::SingleRandomOrder};

  void validate() const;
};

/// Limit price for a new order on `side`: the same-side best quote moved
/// round(m_p1 + s_p1 * x) ticks into the book, x ~ Student-t(nu_p1).
/// Draws that are below one tick or would cross are re-drawn; after 1000
/// attempts the price is clamped one tick inside the spread.
Price draw_placement_price(const OrderBook& book, Side side, const AgentParams& params, Rng& rng);

/// ceil of an exponential draw with the given mean, at least 1.
Volume draw_volume(double mean, Rng& rng);

/// One tick of the cancellation clock. Returns the ids removed, in book order.
std::vector<OrderId> cancellation_step(OrderBook& book, const AgentParams& params, Rng& rng);

struct BookEvent {
  double t{0.0};
  OrderKind kind{OrderKind::Limit};
  /// Limit/cancel: side of the order. Market: aggressor side.
  Side side{Side::Bid};
  /// Limit/cancel: order price. Market: last execution price.
  Price price{0};
  Volume volume{0};
  OrderId id{0};
};

struct SimulationConfig {
  HawkesModelSpec spec{preset_spec(Variant::HP)};
  AgentParams agents;
  double horizon{86400.0};
  /// Liquidity-provider-only pre-roll that builds the initial book. It
  /// precedes the recorded window [0, horizon].
  double warmup{3600.0};
  std::uint64_t seed{1};
  Price initial_mid{10000};
  int seed_levels{5};
  bool record_snapshots{false};

  void validate() const;
};

/// Fate of the limit orders submitted inside the recorded window.
struct OrderAccounting {
  std::size_t submitted{0};
  std::size_t fully_filled{0};
  std::size_t cancelled{0};
  std::size_t resting{0};
};

struct SimulationOutput {
  /// Market and limit arrival times that drove the run.
  EventStream order_flow;
  std::vector<BookEvent> events;
  /// Spread (ticks) and mid-price (ticks) after every book change, starting
  /// with the pre-rolled book at t = 0.
  std::vector<TimedValue> spread;
  std::vector<TimedValue> mid;
  std::vector<Trade> trades;
  /// One top-five row per book event when record_snapshots is set.
  std::vector<Snapshot> snapshots;
  OrderAccounting accounting;
  std::size_t cancellation_ticks{0};
  std::size_t resting_orders_at_end{0};

  [[nodiscard]] std::size_t count(OrderKind kind) const;
  /// Market and limit events on the seconds clock, for duration statistics.
  [[nodiscard]] std::vector<FlowEvent> flow_events() const;
  /// Times of market and limit events.
  [[nodiscard]] std::vector<double> order_times() const;
};

/// Runs the liquidity provider and the noise trader against one book. Market
/// and limit arrivals are simulate(spec, horizon, seed); cancellation ticks
/// are an independent Poisson clock. Throws EmptyBookSide if either side
/// of the book empties.
SimulationOutput run_simulation(const SimulationConfig& config);

/// CSV writers: `t,kind,side,price_ticks,volume`, `t,spread_ticks`, `t,mid_ticks`.
void write_events_csv(std::ostream& os, const std::vector<BookEvent>& events);
void write_series_csv(std::ostream& os, const std::vector<TimedValue>& series,
                      std::string_view value_column);

/// Readers for the two formats above. Throw DataError with the line number.
std::vector<BookEvent> read_events_csv(std::istream& is);
/// Any `t,<name>` two-column series; times must be non-decreasing.
std::vector<TimedValue> read_series_csv(std::istream& is);

}  // namespace hlob
