#include "hlob/hawkes.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "hlob/errors.hpp"
#include "hlob/rng.hpp"

namespace hlob {

char mark_code(Mark mark) { return mark == Mark::Market ? 'M' : 'L'; }

double ExponentialKernel::operator()(double lag) const {
  return lag < 0.0 ? 0.0 : alpha * std::exp(-beta * lag);
}

double ExponentialKernel::integral(double lag) const {
  return lag <= 0.0 ? 0.0 : alpha / beta * -std::expm1(-beta * lag);
}

namespace {

void check_kernel(const std::optional<ExponentialKernel>& k, const char* name) {
  if (!k) return;
  if (!(k->alpha >= 0.0) || !std::isfinite(k->alpha))
    throw std::invalid_argument(fmt::format("kernel {}: alpha must be >= 0 (got {})", name, k->alpha));
  if (!(k->beta > 0.0) || !std::isfinite(k->beta))
    throw std::invalid_argument(fmt::format("kernel {}: beta must be > 0 (got {})", name, k->beta));
}

void check_stable(const std::optional<ExponentialKernel>& k, const char* name) {
  if (k && !(k->branching_ratio() < 1.0))
    throw std::invalid_argument(fmt::format(
        "unstable spec: alpha_{0}/beta_{0} = {1}/{2} = {3} violates alpha_{0}/beta_{0} < 1", name,
        k->alpha, k->beta, k->branching_ratio()));
}

double ratio_or_zero(const std::optional<ExponentialKernel>& k) {
  return k ? k->branching_ratio() : 0.0;
}

// Running sum of exp(-beta (t - t_j)) over exciting events t_j < t.
struct DecayState {
  double beta{1.0};
  double sum{0.0};
  void advance(double dt) {
    if (sum != 0.0) sum *= std::exp(-beta * dt);
  }
};

}  // namespace

void HawkesModelSpec::validate() const {
  if (!(mu0 > 0.0) || !std::isfinite(mu0))
    throw std::invalid_argument(fmt::format("mu0 must be > 0 (got {})", mu0));
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0))
    throw std::invalid_argument(fmt::format("lambda0 must be >= 0 (got {})", lambda0));
  check_kernel(kernel_mm, "MM");
  check_kernel(kernel_lm, "LM");
  check_kernel(kernel_ll, "LL");
  check_stable(kernel_mm, "MM");
  check_stable(kernel_ll, "LL");
}

bool HawkesModelSpec::is_stable() const {
  try {
    validate();
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

EventStream::EventStream(std::vector<Event> events, double horizon) : horizon_(horizon) {
  events_.reserve(events.size());
  for (const auto& e : events) push_back(e.t, e.mark);
}

void EventStream::push_back(double t, Mark mark) {
  if (!(t >= 0.0) || !(t <= horizon_))
    throw std::invalid_argument(fmt::format("event time {} outside [0, {}]", t, horizon_));
  if (!events_.empty() && t <= events_.back().t) {
    const double bumped = std::nextafter(events_.back().t, std::numeric_limits<double>::infinity());
    if (events_.back().t - t > 1e-9 * std::max(1.0, t))
      throw std::invalid_argument(
          fmt::format("event time {} precedes previous event {}", t, events_.back().t));
    t = bumped;
  }
  events_.push_back({t, mark});
}

std::size_t EventStream::count(Mark mark) const {
  std::size_t n = 0;
  for (const auto& e : events_) n += e.mark == mark;
  return n;
}

std::vector<double> EventStream::times(Mark mark) const {
  std::vector<double> out;
  for (const auto& e : events_)
    if (e.mark == mark) out.push_back(e.t);
  return out;
}

double intensity_at(const HawkesModelSpec& spec, const EventStream& stream, double t,
                    Mark component) {
  double value = component == Mark::Market ? spec.mu0 : spec.lambda0;
  for (const auto& e : stream.events()) {
    if (!(e.t < t)) break;
    const double lag = t - e.t;
    if (component == Mark::Market) {
      if (e.mark == Mark::Market && spec.kernel_mm) value += (*spec.kernel_mm)(lag);
    } else if (e.mark == Mark::Market) {
      if (spec.kernel_lm) value += (*spec.kernel_lm)(lag);
    } else if (spec.kernel_ll) {
      value += (*spec.kernel_ll)(lag);
    }
  }
  return value;
}

StationaryRates stationary_rates(const HawkesModelSpec& spec) {
  spec.validate();
  StationaryRates r;
  r.market = spec.mu0 / (1.0 - ratio_or_zero(spec.kernel_mm));
  r.limit = (spec.lambda0 + ratio_or_zero(spec.kernel_lm) * r.market) /
            (1.0 - ratio_or_zero(spec.kernel_ll));
  return r;
}

EventStream simulate(const HawkesModelSpec& spec, double horizon, std::uint64_t seed) {
  spec.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument(fmt::format("horizon must be > 0 (got {})", horizon));

  Rng rng = make_rng(seed, RngStream::OrderFlow);
  const ExponentialKernel none{0.0, 1.0};
  const ExponentialKernel mm = spec.kernel_mm.value_or(none);
  const ExponentialKernel lm = spec.kernel_lm.value_or(none);
  const ExponentialKernel ll = spec.kernel_ll.value_or(none);

  // Excitation parts of the intensities at the current time. Between events they
  // only decay, so their current total bounds the intensity until the next event.
  double ex_mm = 0.0, ex_lm = 0.0, ex_ll = 0.0;
  EventStream out(horizon);
  double t = 0.0;
  for (;;) {
    const double bound = spec.mu0 + spec.lambda0 + ex_mm + ex_lm + ex_ll;
    const double wait = exponential(rng, bound);
    t += wait;
    if (t > horizon) break;
    ex_mm *= std::exp(-mm.beta * wait);
    ex_lm *= std::exp(-lm.beta * wait);
    ex_ll *= std::exp(-ll.beta * wait);
    const double market = spec.mu0 + ex_mm;
    const double limit = spec.lambda0 + ex_lm + ex_ll;
    const double u = uniform_open0(rng) * bound;
    if (u > market + limit) continue;
    if (u <= market) {
      out.push_back(t, Mark::Market);
      ex_mm += mm.alpha;
      ex_lm += lm.alpha;
    } else {
      out.push_back(t, Mark::Limit);
      ex_ll += ll.alpha;
    }
  }
  return out;
}

namespace {

// Baseline and the (kernel, exciting mark) pairs that drive one component.
struct ComponentTerms {
  double baseline{0.0};
  struct Term {
    ExponentialKernel kernel;
    Mark source;
  };
  std::vector<Term> terms;
};

ComponentTerms terms_for(const HawkesModelSpec& spec, Mark component) {
  ComponentTerms c;
  if (component == Mark::Market) {
    c.baseline = spec.mu0;
    if (spec.kernel_mm) c.terms.push_back({*spec.kernel_mm, Mark::Market});
  } else {
    c.baseline = spec.lambda0;
    if (spec.kernel_lm) c.terms.push_back({*spec.kernel_lm, Mark::Market});
    if (spec.kernel_ll) c.terms.push_back({*spec.kernel_ll, Mark::Limit});
  }
  return c;
}

// Walks the stream once, calling visit(t, intensity, compensator) at every
// event of `component`. Intensity is the left limit at t; compensator is the
// integrated intensity over [0, t].
template <typename Visit>
void walk_component(const HawkesModelSpec& spec, const EventStream& stream, Mark component,
                    Visit&& visit) {
  const ComponentTerms c = terms_for(spec, component);
  std::vector<DecayState> state;
  std::vector<double> exciting_count(c.terms.size(), 0.0);
  for (const auto& term : c.terms) state.push_back({term.kernel.beta, 0.0});

  double prev = 0.0;
  for (const auto& e : stream.events()) {
    const double dt = e.t - prev;
    for (auto& s : state) s.advance(dt);
    prev = e.t;
    if (e.mark == component) {
      double lambda = c.baseline;
      double comp = c.baseline * e.t;
      for (std::size_t k = 0; k < c.terms.size(); ++k) {
        const auto& kern = c.terms[k].kernel;
        lambda += kern.alpha * state[k].sum;
        comp += kern.alpha / kern.beta * (exciting_count[k] - state[k].sum);
      }
      visit(e.t, lambda, comp);
    }
    for (std::size_t k = 0; k < c.terms.size(); ++k) {
      if (e.mark == c.terms[k].source) {
        state[k].sum += 1.0;
        exciting_count[k] += 1.0;
      }
    }
  }
}

double total_compensator(const HawkesModelSpec& spec, const EventStream& stream, Mark component) {
  const ComponentTerms c = terms_for(spec, component);
  const double horizon = stream.horizon();
  double comp = c.baseline * horizon;
  for (const auto& e : stream.events())
    for (const auto& term : c.terms)
      if (e.mark == term.source) comp += term.kernel.integral(horizon - e.t);
  return comp;
}

}  // namespace

double component_log_likelihood(const HawkesModelSpec& spec, const EventStream& stream,
                                Mark component) {
  double sum_log = 0.0;
  walk_component(spec, stream, component, [&](double, double lambda, double) {
    sum_log += lambda > 0.0 ? std::log(lambda) : -std::numeric_limits<double>::infinity();
  });
  return sum_log - total_compensator(spec, stream, component);
}

double log_likelihood(const HawkesModelSpec& spec, const EventStream& stream) {
  return component_log_likelihood(spec, stream, Mark::Market) +
         component_log_likelihood(spec, stream, Mark::Limit);
}

std::vector<double> residuals(const HawkesModelSpec& spec, const EventStream& stream,
                              Mark component) {
  std::vector<double> out;
  double last = 0.0;
  walk_component(spec, stream, component, [&](double, double, double comp) {
    out.push_back(comp - last);
    last = comp;
  });
  return out;
}

void write_event_stream(std::ostream& os, const EventStream& stream) {
  os << fmt::format("# horizon={:.9f}\n", stream.horizon());
  os << "t,mark\n";
  for (const auto& e : stream.events()) os << fmt::format("{:.9f},{}\n", e.t, mark_code(e.mark));
}

EventStream read_event_stream(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<double> horizon;
  bool header = false;
  std::vector<Event> events;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("horizon=");
      if (pos != std::string::npos) {
        try {
          horizon = std::stod(line.substr(pos + 8));
        } catch (const std::exception&) {
          throw DataError("unparsable horizon", lineno);
        }
      }
      continue;
    }
    if (!header) {
      if (line != "t,mark") throw DataError("expected header 't,mark'", lineno);
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma + 2 != line.size())
      throw DataError("expected '<t>,<M|L>'", lineno);
    double t = 0.0;
    try {
      std::size_t used = 0;
      t = std::stod(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError("unparsable timestamp", lineno);
    }
    const char code = line[comma + 1];
    if (code != 'M' && code != 'L') throw DataError("mark must be M or L", lineno);
    if (!events.empty() && t < events.back().t)
      throw DataError("timestamps not ordered", lineno);
    events.push_back({t, code == 'M' ? Mark::Market : Mark::Limit});
  }
  if (!header) throw DataError("missing header 't,mark'");
  if (!horizon) throw DataError("missing '# horizon=<seconds>' line");
  if (!events.empty() && events.back().t > *horizon)
    throw DataError("event after horizon");
  return EventStream(std::move(events), *horizon);
}

}  // namespace hlob
