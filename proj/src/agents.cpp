#include "hlob/agents.hpp"

#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "csv_fields.hpp"
#include "hlob/errors.hpp"

namespace hlob {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::HP: return "HP";
    case Variant::LM: return "LM";
    case Variant::MM: return "MM";
    case Variant::MM_LL: return "MM+LL";
    case Variant::MM_LM: return "MM+LM";
    case Variant::MM_LL_LM: return "MM+LL+LM";
  }
  return "";
}

Variant parse_variant(std::string_view name) {
  std::string canonical(name);
  for (char& c : canonical)
    if (c == ' ' || c == '_') c = '+';
  for (Variant v : kAllVariants)
    if (variant_name(v) == canonical) return v;
  throw std::invalid_argument(fmt::format("unknown variant '{}'", name));
}

HawkesModelSpec preset_spec(Variant v) {
  HawkesModelSpec s;
  switch (v) {
    case Variant::HP:
      s.mu0 = 0.22;
      s.lambda0 = 1.69;
      break;
    case Variant::LM:
      s.mu0 = 0.22;
      s.lambda0 = 0.79;
      s.kernel_lm = ExponentialKernel{5.8, 1.8};
      break;
    case Variant::MM:
      s.mu0 = 0.09;
      s.kernel_mm = ExponentialKernel{1.7, 6.0};
      s.lambda0 = 1.69;
      break;
    case Variant::MM_LL:
      s.mu0 = 0.09;
      s.kernel_mm = ExponentialKernel{1.7, 6.0};
      s.lambda0 = 0.60;
      s.kernel_ll = ExponentialKernel{1.7, 6.0};
      break;
    case Variant::MM_LM:
      s.mu0 = 0.12;
      s.kernel_mm = ExponentialKernel{1.7, 6.0};
      s.lambda0 = 0.82;
      s.kernel_lm = ExponentialKernel{5.8, 1.8};
      break;
    case Variant::MM_LL_LM:
      s.mu0 = 0.12;
      s.kernel_mm = ExponentialKernel{1.7, 5.8};
      s.lambda0 = 0.02;
      s.kernel_lm = ExponentialKernel{5.8, 1.8};
      s.kernel_ll = ExponentialKernel{1.7, 6.0};
      break;
  }
  return s;
}

void AgentParams::validate() const {
  auto require = [](bool ok, const char* what, double v) {
    if (!ok) throw std::invalid_argument(fmt::format("{} (got {})", what, v));
  };
  require(nu_p1 > 0.0, "nu_p1 must be > 0", nu_p1);
  require(s_p1 > 0.0, "s_p1 must be > 0", s_p1);
  require(std::isfinite(m_p1), "m_p1 must be finite", m_p1);
  require(m_v1 > 0.0, "m_v1 must be > 0", m_v1);
  require(m_v2 > 0.0, "m_v2 must be > 0", m_v2);
  require(lambda_c >= 0.0, "lambda_c must be >= 0", lambda_c);
  require(delta >= 0.0 && delta <= 1.0, "delta must be in [0, 1]", delta);
}

void SimulationConfig::validate() const {
  spec.validate();
  agents.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument(fmt::format("horizon must be > 0 (got {})", horizon));
  if (!(warmup >= 0.0) || !std::isfinite(warmup))
    throw std::invalid_argument(fmt::format("warmup must be >= 0 (got {})", warmup));
  if (seed_levels < 1) throw std::invalid_argument("seed_levels must be >= 1");
  if (initial_mid <= seed_levels)
    throw std::invalid_argument("initial_mid must exceed seed_levels so every seed price is positive");
}

Price draw_placement_price(const OrderBook& book, Side side, const AgentParams& params, Rng& rng) {
  const auto same = book.best(side);
  if (!same) throw std::logic_error("draw_placement_price: no same-side quote");
  const auto other = book.best(opposite(side));
  std::student_t_distribution<double> student(params.nu_p1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double offset = params.m_p1 + params.s_p1 * student(rng);
    if (!(std::abs(offset) < 1e12)) continue;
    const Price ticks = std::llround(offset);
    const Price price = side == Side::Bid ? *same - ticks : *same + ticks;
    if (price < 1) continue;
    if (other && (side == Side::Bid ? price >= *other : price <= *other)) continue;
    return price;
  }
  if (!other) return *same;
  return side == Side::Bid ? std::max<Price>(1, *other - 1) : *other + 1;
}

Volume draw_volume(double mean, Rng& rng) {
  const double x = exponential(rng, 1.0 / mean);
  if (!(x < 9e15)) return static_cast<Volume>(9e15);
  return std::max<Volume>(1, static_cast<Volume>(std::ceil(x)));
}

namespace {

std::vector<Order> cancel_orders(OrderBook& book, const AgentParams& params, Rng& rng) {
  std::vector<Order> chosen;
  if (book.order_count() == 0) return chosen;
  if (params.cancellation == CancellationRule::IndependentThinning) {
    if (params.delta <= 0.0) return chosen;
    book.for_each_order([&](const Order& o) {
      if (uniform_open0(rng) <= params.delta) chosen.push_back(o);
    });
  } else if (uniform_open0(rng) <= params.delta) {
    const auto n = book.order_count();
    const auto pick = std::min(n - 1, static_cast<std::size_t>((1.0 - uniform_open0(rng)) * static_cast<double>(n)));
    chosen.push_back(book.order_at(pick));
  }
  for (const auto& o : chosen) book.cancel(o.id);
  return chosen;
}

// Two-sided book around `mid`: one order of ceil(m_v1) at each of the first
// `levels` ticks on either side.
void seed_book(OrderBook& book, const SimulationConfig& c) {
  const auto volume = static_cast<Volume>(std::ceil(c.agents.m_v1));
  for (int k = 1; k <= c.seed_levels; ++k) {
    book.submit_limit(Side::Bid, c.initial_mid - k, volume, -c.warmup);
    book.submit_limit(Side::Ask, c.initial_mid + k, volume, -c.warmup);
  }
}

void require_two_sided(const OrderBook& book, double t, std::string_view during) {
  if (book.empty(Side::Bid) || book.empty(Side::Ask))
    throw EmptyBookSide(fmt::format("{} side of the book emptied at t={:.6f} s after a {} event",
                                    book.empty(Side::Bid) ? "bid" : "ask", t, during));
}

Side draw_side(Rng& rng) { return uniform_open0(rng) <= 0.5 ? Side::Bid : Side::Ask; }

// Liquidity provider alone: Poisson limit arrivals at the model's long-run
// limit rate plus the cancellation clock, over `warmup` seconds.
void preroll(OrderBook& book, const SimulationConfig& c) {
  Rng rng = make_rng(c.seed, RngStream::Preroll);
  const double limit_rate = stationary_rates(c.spec).limit;
  const double total = limit_rate + c.agents.lambda_c;
  if (total <= 0.0) return;
  double t = 0.0;
  for (;;) {
    t += exponential(rng, total);
    if (t > c.warmup) break;
    if (uniform_open0(rng) * total <= limit_rate) {
      const Side side = draw_side(rng);
      const Price price = draw_placement_price(book, side, c.agents, rng);
      book.submit_limit(side, price, draw_volume(c.agents.m_v1, rng), t - c.warmup);
      require_two_sided(book, t - c.warmup, "pre-roll limit");
    } else {
      cancel_orders(book, c.agents, rng);
      require_two_sided(book, t - c.warmup, "pre-roll cancellation");
    }
  }
}

}  // namespace

std::vector<OrderId> cancellation_step(OrderBook& book, const AgentParams& params, Rng& rng) {
  std::vector<OrderId> ids;
  for (const auto& o : cancel_orders(book, params, rng)) ids.push_back(o.id);
  return ids;
}

std::size_t SimulationOutput::count(OrderKind kind) const {
  std::size_t n = 0;
  for (const auto& e : events) n += e.kind == kind;
  return n;
}

std::vector<FlowEvent> SimulationOutput::flow_events() const {
  std::vector<FlowEvent> out;
  out.reserve(events.size());
  for (const auto& e : events)
    if (e.kind != OrderKind::Cancel) out.push_back({e.t, e.kind, e.side});
  return out;
}

std::vector<double> SimulationOutput::order_times() const {
  std::vector<double> out;
  for (const auto& e : events)
    if (e.kind != OrderKind::Cancel) out.push_back(e.t);
  return out;
}

SimulationOutput run_simulation(const SimulationConfig& config) {
  config.validate();
  OrderBook book;
  seed_book(book, config);
  preroll(book, config);

  SimulationOutput out;
  out.order_flow = simulate(config.spec, config.horizon, config.seed);
  Rng cancel_clock = make_rng(config.seed, RngStream::Cancellation);
  Rng rng = make_rng(config.seed, RngStream::Placement);
  const OrderId first_id = book.next_id();
  const AgentParams& ap = config.agents;

  auto record = [&](double t, std::optional<TradePrint> print) {
    out.spread.push_back({t, static_cast<double>(book.spread())});
    out.mid.push_back({t, book.mid()});
    if (config.record_snapshots)
      out.snapshots.push_back(book.snapshot(static_cast<std::int64_t>(std::floor(t * 1000.0)), print));
  };
  record(0.0, std::nullopt);

  double next_cancel = ap.lambda_c > 0.0 ? exponential(cancel_clock, ap.lambda_c)
                                         : std::numeric_limits<double>::infinity();
  const auto& flow = out.order_flow.events();
  std::size_t next_flow = 0;
  for (;;) {
    const double t_flow = next_flow < flow.size() ? flow[next_flow].t : std::numeric_limits<double>::infinity();
    if (t_flow > config.horizon && next_cancel > config.horizon) break;

    if (t_flow <= next_cancel) {
      const Mark mark = flow[next_flow++].mark;
      const double t = t_flow;
      if (mark == Mark::Market) {
        const Side aggressor = draw_side(rng);
        const Volume volume = draw_volume(ap.m_v2, rng);
        auto fills = book.submit_market(aggressor, volume, t);
        const auto print = trade_print(fills);
        out.events.push_back({t, OrderKind::Market, aggressor, print->price, print->quantity, 0});
        for (const auto& f : fills) {
          // A maker appears at most once per market order.
          if (f.maker_id >= first_id && !book.contains(f.maker_id)) ++out.accounting.fully_filled;
          out.trades.push_back(f);
        }
        require_two_sided(book, t, "market");
        record(t, print);
      } else {
        const Side side = draw_side(rng);
        const Price price = draw_placement_price(book, side, ap, rng);
        const Volume volume = draw_volume(ap.m_v1, rng);
        const auto res = book.submit_limit(side, price, volume, t, 1);
        ++out.accounting.submitted;
        out.events.push_back({t, OrderKind::Limit, side, price, volume, res.id});
        for (const auto& f : res.trades) out.trades.push_back(f);
        require_two_sided(book, t, "limit");
        record(t, std::nullopt);
      }
    } else {
      const double t = next_cancel;
      next_cancel += exponential(cancel_clock, ap.lambda_c);
      ++out.cancellation_ticks;
      const auto cancelled = cancel_orders(book, ap, rng);
      if (cancelled.empty()) continue;
      for (const auto& o : cancelled) {
        out.events.push_back({t, OrderKind::Cancel, o.side, o.price, o.volume, o.id});
        if (o.id >= first_id) ++out.accounting.cancelled;
      }
      require_two_sided(book, t, "cancellation");
      record(t, std::nullopt);
    }
  }

  book.for_each_order([&](const Order& o) {
    if (o.id >= first_id) ++out.accounting.resting;
  });
  out.resting_orders_at_end = book.order_count();
  return out;
}

void write_events_csv(std::ostream& os, const std::vector<BookEvent>& events) {
  os << "t,kind,side,price_ticks,volume\n";
  for (const auto& e : events)
    os << fmt::format("{:.9f},{},{},{},{}\n", e.t, kind_code(e.kind), side_code(e.side), e.price, e.volume);
}

void write_series_csv(std::ostream& os, const std::vector<TimedValue>& series,
                      std::string_view value_column) {
  os << "t," << value_column << '\n';
  for (const auto& p : series) os << fmt::format("{:.9f},{:.9g}\n", p.t, p.value);
}

std::vector<BookEvent> read_events_csv(std::istream& is) {
  std::vector<BookEvent> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "t,kind,side,price_ticks,volume")
        throw DataError("expected header 't,kind,side,price_ticks,volume'", lineno);
      header = true;
      continue;
    }
    const auto f = detail::split_fields(line);
    if (f.size() != 5) throw DataError(fmt::format("expected 5 fields, got {}", f.size()), lineno);
    BookEvent e;
    e.t = detail::parse_double(f[0], "time", lineno);
    e.kind = detail::parse_kind(f[1], lineno);
    e.side = detail::parse_side(f[2], lineno);
    e.price = detail::parse_int<Price>(f[3], "price", lineno);
    e.volume = detail::parse_int<Volume>(f[4], "volume", lineno);
    if (!out.empty() && e.t < out.back().t) throw DataError("timestamps not ordered", lineno);
    out.push_back(e);
  }
  if (!header) throw DataError("missing header");
  return out;
}

std::vector<TimedValue> read_series_csv(std::istream& is) {
  std::vector<TimedValue> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() != 2) throw DataError(fmt::format("expected 2 fields, got {}", f.size()), lineno);
    if (!header) {
      if (f[0] != "t") throw DataError("expected header 't,<value>'", lineno);
      header = true;
      continue;
    }
    TimedValue p{detail::parse_double(f[0], "time", lineno), detail::parse_double(f[1], "value", lineno)};
    if (!out.empty() && p.t < out.back().t) throw DataError("timestamps not ordered", lineno);
    out.push_back(p);
  }
  if (!header) throw DataError("missing header");
  return out;
}

}  // namespace hlob
