#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hlob {

/// Which of the two order flows an event belongs to.
enum class Mark : std::uint8_t { Market, Limit };

char mark_code(Mark mark);

/// nu(t) = alpha * exp(-beta * t). alpha in events/s, beta in 1/s.
struct ExponentialKernel {
  double alpha{0.0};
  double beta{1.0};

  [[nodiscard]] double branching_ratio() const { return alpha / beta; }
  [[nodiscard]] double operator()(double lag) const;
  /// Integral of the kernel over [0, lag].
  [[nodiscard]] double integral(double lag) const;
};

/// Market flow mu(t) excited only by market orders (MM); limit flow lambda(t)
/// excited by market orders (LM) and by itself (LL). There is no market-by-limit
/// kernel: the structure is triangular by construction.
struct HawkesModelSpec {
  double mu0{0.0};
  double lambda0{0.0};
  std::optional<ExponentialKernel> kernel_mm;
  std::optional<ExponentialKernel> kernel_lm;
  std::optional<ExponentialKernel> kernel_ll;

  /// Throws std::invalid_argument naming the first violated condition.
  void validate() const;
  [[nodiscard]] bool is_stable() const;
};

struct Event {
  double t{0.0};
  Mark mark{Mark::Market};

  friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered marked events on [0, horizon]; timestamps strictly increasing.
class EventStream {
 public:
  EventStream() = default;
  explicit EventStream(double horizon) : horizon_(horizon) {}
  EventStream(std::vector<Event> events, double horizon);

  /// Appends an event. A timestamp equal to (or, from rounding, below) the
  /// last one is bumped to the next representable double.
  void push_back(double t, Mark mark);

  [[nodiscard]] const std::vector<Event>& events() const { return events_; }
  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] std::size_t size() const { return events_.size(); }
  [[nodiscard]] bool empty() const { return events_.empty(); }
  [[nodiscard]] std::size_t count(Mark mark) const;
  [[nodiscard]] std::vector<double> times(Mark mark) const;

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  std::vector<Event> events_;
  double horizon_{0.0};
};

struct StationaryRates {
  double market{0.0};
  double limit{0.0};
};

/// Intensity of `component` at time t, using only events strictly before t.
double intensity_at(const HawkesModelSpec& spec, const EventStream& stream, double t,
                    Mark component);

/// Long-run event rates of a stable spec.
StationaryRates stationary_rates(const HawkesModelSpec& spec);

/// Exact sample on [0, horizon] by thinning. Deterministic for a given seed.
EventStream simulate(const HawkesModelSpec& spec, double horizon, std::uint64_t seed);

/// Log-likelihood of one component on [0, horizon] in O(n).
/// Returns -infinity if some event of the component has zero intensity.
double component_log_likelihood(const HawkesModelSpec& spec, const EventStream& stream,
                                Mark component);

/// Sum of both components' log-likelihoods.
double log_likelihood(const HawkesModelSpec& spec, const EventStream& stream);

/// Compensator increments between consecutive events of `component`
/// (the first increment is measured from t = 0). I.i.d. Exp(1) under the true spec.
std::vector<double> residuals(const HawkesModelSpec& spec, const EventStream& stream,
                              Mark component);

/// CSV with a `# horizon=<seconds>` comment line and header `t,mark`.
void write_event_stream(std::ostream& os, const EventStream& stream);
EventStream read_event_stream(std::istream& is);

}  // namespace hlob
