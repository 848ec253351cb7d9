#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hlob/types.hpp"

namespace hlob {

/// Histogram bin layout. Linear bins are [origin + k*width, origin + (k+1)*width);
/// log bins are [10^(k/b), 10^((k+1)/b)) for b bins per decade.
struct Binning {
  enum class Kind { Linear, Log };
  Kind kind{Kind::Linear};
  double width{1.0};
  double origin{0.0};
  int bins_per_decade{10};

  static Binning linear(double width, double origin = 0.0) {
    return {Kind::Linear, width, origin, 0};
  }
  /// Unit-width bins centred on integers, for tick-valued data.
  static Binning unit_ticks() { return linear(1.0, -0.5); }
  static Binning log(int bins_per_decade) { return {Kind::Log, 0.0, 0.0, bins_per_decade}; }
};

struct EmpiricalPdf {
  Eigen::ArrayXd edges;    // size = bins + 1
  Eigen::ArrayXd density;  // size = bins
  std::size_t count{0};

  [[nodiscard]] Eigen::Index bins() const { return density.size(); }
  [[nodiscard]] Eigen::ArrayXd widths() const {
    return edges.tail(bins()) - edges.head(bins());
  }
  /// Arithmetic bin centres for linear bins, geometric for log bins.
  [[nodiscard]] Eigen::ArrayXd centres(Binning::Kind kind) const;
  [[nodiscard]] double integral() const { return (density * widths()).sum(); }
  /// Probability mass below x, linear within the bin containing x.
  [[nodiscard]] double mass_below(double x) const;
};

/// Histogram density estimate. Throws std::invalid_argument on empty input
/// or on non-positive samples with log binning.
EmpiricalPdf empirical_pdf(std::span<const double> samples, const Binning& binning);

/// Exact fraction of samples strictly below x.
double fraction_below(std::span<const double> samples, double x);

/// Discrete distribution: value -> non-negative weight.
class WeightedDistribution {
 public:
  void add(double value, double weight);

  [[nodiscard]] const std::map<double, double>& weights() const { return weights_; }
  [[nodiscard]] double total() const { return total_; }
  [[nodiscard]] double mass(double value) const;
  [[nodiscard]] double mass_at_or_below(double value) const;
  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;
  /// Smallest value whose cumulative mass reaches q.
  [[nodiscard]] double quantile(double q) const;

 private:
  std::map<double, double> weights_;
  double total_{0.0};
};

struct SpreadDistributions {
  WeightedDistribution time_weighted;
  WeightedDistribution event_time;
};

/// Event-time and physical-time distributions of a step series. In physical
/// time each value is weighted by how long it was held: until the next
/// observation, and for the last one until `end_time` if given (otherwise
/// the last observation gets no physical-time weight).
SpreadDistributions time_weighted_spread(std::span<const TimedValue> series,
                                         std::optional<double> end_time = std::nullopt);

enum class Direction { Less, Greater, None };
std::string direction_name(Direction d);

struct TestResult {
  std::string test;
  double statistic{0.0};
  double p_value{1.0};
  /// Less means the first sample is stochastically smaller.
  Direction direction{Direction::None};
};

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);
/// Limiting CDF of the Cramer-von Mises statistic.
double cvm_limit_cdf(double x);
/// 1 - cvm_limit_cdf(x), computed directly so that it keeps relative
/// precision far into the tail.
double cvm_limit_sf(double x);

/// Two-sample Kolmogorov-Smirnov; p from the Kolmogorov limit at sqrt(nm/(n+m)) D.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// One-sample Kolmogorov-Smirnov against a continuous CDF.
TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Two-sample Cramer-von Mises T (Anderson's form, mid-ranks for ties). The
/// p-value applies the one-sample limit law to T standardized by its finite
/// sample mean and variance. Needs two observations per sample.
TestResult cvm_two_sample(std::span<const double> a, std::span<const double> b);
/// Mann-Whitney U of the first sample, two-sided p from the normal
/// approximation with tie and continuity corrections.
TestResult mann_whitney(std::span<const double> a, std::span<const double> b);

struct TercileWaits {
  double lower_bound{0.0};  // values <= lower_bound are in the first tercile
  double upper_bound{0.0};  // values > upper_bound are in the third tercile
  std::array<double, 3> mean_wait{};
  std::array<std::size_t, 3> count{};
};

/// Mean time from each series observation to the next event strictly after
/// it, grouped by terciles of the observed value. Empty terciles report NaN.
/// Needs at least three distinct observed values.
TercileWaits conditional_waiting_time(std::span<const TimedValue> series,
                                      std::span<const double> event_times);

/// First differences of the series sampled (previous-tick) on the grid
/// start, start + interval, ... <= end. Defaults span the series.
std::vector<double> mid_price_variations(std::span<const TimedValue> series, double interval = 30.0,
                                         std::optional<double> start = std::nullopt,
                                         std::optional<double> end = std::nullopt);

void write_pdf_csv(std::ostream& os, const EmpiricalPdf& pdf, Binning::Kind kind);
void write_weighted_csv(std::ostream& os, const WeightedDistribution& dist);
void write_tests_csv(std::ostream& os, std::span<const TestResult> results);

}  // namespace hlob
