#include "hlob/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace hlob {

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Average ranks (1-based) of `values`, ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

void require_nonempty(std::span<const double> a, std::span<const double> b, const char* test) {
  if (a.empty() || b.empty()) throw std::invalid_argument(fmt::format("{}: empty sample", test));
}

std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

Eigen::ArrayXd EmpiricalPdf::centres(Binning::Kind kind) const {
  const Eigen::Index n = bins();
  if (kind == Binning::Kind::Log) return (edges.head(n) * edges.tail(n)).sqrt();
  return 0.5 * (edges.head(n) + edges.tail(n));
}

double EmpiricalPdf::mass_below(double x) const {
  double mass = 0.0;
  for (Eigen::Index k = 0; k < bins(); ++k) {
    const double lo = edges(k), hi = edges(k + 1);
    if (x >= hi)
      mass += density(k) * (hi - lo);
    else if (x > lo)
      mass += density(k) * (x - lo);
  }
  return mass;
}

EmpiricalPdf empirical_pdf(std::span<const double> samples, const Binning& binning) {
  if (samples.empty()) throw std::invalid_argument("empirical_pdf: no samples");
  const bool log = binning.kind == Binning::Kind::Log;
  if (log && binning.bins_per_decade <= 0)
    throw std::invalid_argument("empirical_pdf: bins_per_decade must be > 0");
  if (!log && !(binning.width > 0.0)) throw std::invalid_argument("empirical_pdf: width must be > 0");

  auto index = [&](double x) -> long long {
    if (log) {
      if (!(x > 0.0)) throw std::invalid_argument("empirical_pdf: log binning needs positive samples");
      return static_cast<long long>(std::floor(std::log10(x) * binning.bins_per_decade));
    }
    return static_cast<long long>(std::floor((x - binning.origin) / binning.width));
  };
  auto edge = [&](long long k) {
    return log ? std::pow(10.0, static_cast<double>(k) / binning.bins_per_decade)
               : binning.origin + static_cast<double>(k) * binning.width;
  };

  std::vector<long long> idx;
  idx.reserve(samples.size());
  for (double x : samples) {
    if (!std::isfinite(x)) throw std::invalid_argument("empirical_pdf: non-finite sample");
    idx.push_back(index(x));
  }
  const auto [lo, hi] = std::minmax_element(idx.begin(), idx.end());
  const long long first = *lo;
  const Eigen::Index bins = static_cast<Eigen::Index>(*hi - first + 1);

  EmpiricalPdf pdf;
  pdf.count = samples.size();
  pdf.edges.resize(bins + 1);
  for (Eigen::Index k = 0; k <= bins; ++k) pdf.edges(k) = edge(first + k);
  Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(bins);
  for (long long k : idx) counts(static_cast<Eigen::Index>(k - first)) += 1.0;
  pdf.density = counts / (static_cast<double>(samples.size()) * (pdf.edges.tail(bins) - pdf.edges.head(bins)));
  return pdf;
}

double fraction_below(std::span<const double> samples, double x) {
  if (samples.empty()) throw std::invalid_argument("fraction_below: no samples");
  const auto n = std::count_if(samples.begin(), samples.end(), [&](double v) { return v < x; });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

void WeightedDistribution::add(double value, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("WeightedDistribution: negative weight");
  weights_[value] += weight;
  total_ += weight;
}

double WeightedDistribution::mass(double value) const {
  const auto it = weights_.find(value);
  return it == weights_.end() || total_ == 0.0 ? 0.0 : it->second / total_;
}

double WeightedDistribution::mass_at_or_below(double value) const {
  double m = 0.0;
  for (const auto& [v, w] : weights_) {
    if (v > value) break;
    m += w;
  }
  return total_ == 0.0 ? 0.0 : m / total_;
}

double WeightedDistribution::mean() const {
  if (total_ == 0.0) throw std::logic_error("WeightedDistribution: zero total weight");
  double s = 0.0;
  for (const auto& [v, w] : weights_) s += v * w;
  return s / total_;
}

double WeightedDistribution::variance() const {
  const double m = mean();
  double s = 0.0;
  for (const auto& [v, w] : weights_) s += (v - m) * (v - m) * w;
  return s / total_;
}

double WeightedDistribution::quantile(double q) const {
  if (total_ == 0.0) throw std::logic_error("WeightedDistribution: zero total weight");
  double cum = 0.0;
  for (const auto& [v, w] : weights_) {
    cum += w;
    if (cum >= q * total_) return v;
  }
  return weights_.rbegin()->first;
}

SpreadDistributions time_weighted_spread(std::span<const TimedValue> series,
                                         std::optional<double> end_time) {
  if (series.size() < 2)
    throw std::invalid_argument("time_weighted_spread: need at least two observations");
  SpreadDistributions out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out.event_time.add(series[i].value, 1.0);
    double until;
    if (i + 1 < series.size())
      until = series[i + 1].t;
    else if (end_time)
      until = *end_time;
    else
      continue;
    if (until < series[i].t) throw std::invalid_argument("time_weighted_spread: series not time-ordered");
    out.time_weighted.add(series[i].value, until - series[i].t);
  }
  return out;
}

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::Less: return "a<b";
    case Direction::Greater: return "a>b";
    case Direction::None: return "none";
  }
  return "none";
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // P(K <= x) = sqrt(2 pi)/x * sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * c);
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
    return 1.0 - cdf;
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sf += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

double cvm_limit_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double total = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double u = std::exp(std::lgamma(k + 0.5) - std::lgamma(k + 1.0)) /
                     (std::pow(std::numbers::pi, 1.5) * std::sqrt(x));
    const double y = 4.0 * k + 1.0;
    const double q = y * y / (16.0 * x);
    if (q > 700.0) break;
    const double term = u * std::sqrt(y) * std::exp(-q) * std::cyl_bessel_k(0.25, q);
    total += term;
    if (std::abs(term) < 1e-17) break;
  }
  return std::min(total, 1.0);
}

double cvm_limit_sf(double x) {
  if (x <= 0.5) return std::max(0.0, 1.0 - cvm_limit_cdf(x));
  // Smirnov's representation, an alternating sum of integrals over
  // [(2k-1)pi, 2k pi]. With s = lo + (hi - lo)(1 - cos th)/2 the integrands
  // are smooth and even at both ends, so the midpoint rule converges fast.
  constexpr int kNodes = 64;
  const double pi = std::numbers::pi;
  double sf = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double lo = (2 * k - 1) * pi, hi = 2 * k * pi;
    double term = 0.0;
    for (int j = 0; j < kNodes; ++j) {
      const double th = (j + 0.5) * pi / kNodes;
      const double s = lo + (hi - lo) * (1.0 - std::cos(th)) / 2.0;
      const double ds = (hi - lo) / 2.0 * std::sin(th);
      term += 2.0 * std::sqrt(-s / std::sin(s)) * std::exp(-x * s * s / 2.0) / s * ds;
    }
    term *= 1.0 / kNodes;
    sf += k % 2 ? term : -term;
    if (term < 1e-18 * sf) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "ks_two_sample");
  const auto sa = sorted_copy(a), sb = sorted_copy(b);
  const double n = static_cast<double>(sa.size()), m = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d_plus = 0.0, d_minus = 0.0;  // sup(F_a - F_b), sup(F_b - F_a)
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    const double diff = static_cast<double>(i) / n - static_cast<double>(j) / m;
    d_plus = std::max(d_plus, diff);
    d_minus = std::max(d_minus, -diff);
  }
  TestResult r;
  r.test = "ks";
  r.statistic = std::max(d_plus, d_minus);
  r.p_value = kolmogorov_sf(std::sqrt(n * m / (n + m)) * r.statistic);
  if (d_plus > d_minus)
    r.direction = Direction::Less;
  else if (d_minus > d_plus)
    r.direction = Direction::Greater;
  return r;
}

TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  const auto s = sorted_copy(sample);
  const double n = static_cast<double>(s.size());
  double d_plus = 0.0, d_minus = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d_plus = std::max(d_plus, static_cast<double>(i + 1) / n - f);
    d_minus = std::max(d_minus, f - static_cast<double>(i) / n);
  }
  TestResult r;
  r.test = "ks1";
  r.statistic = std::max(d_plus, d_minus);
  r.p_value = kolmogorov_sf(std::sqrt(n) * r.statistic);
  if (d_plus > d_minus)
    r.direction = Direction::Less;
  else if (d_minus > d_plus)
    r.direction = Direction::Greater;
  return r;
}

TestResult cvm_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("cvm_two_sample: each sample needs at least two observations");
  const auto sa = sorted_copy(a), sb = sorted_copy(b);
  const std::size_t nx = sa.size(), ny = sb.size();
  std::vector<double> pooled(sa);
  pooled.insert(pooled.end(), sb.begin(), sb.end());
  const auto r = midranks(pooled);
  double ux = 0.0, uy = 0.0;
  for (std::size_t i = 0; i < nx; ++i) ux += std::pow(r[i] - static_cast<double>(i + 1), 2);
  for (std::size_t j = 0; j < ny; ++j) uy += std::pow(r[nx + j] - static_cast<double>(j + 1), 2);
  const double k = static_cast<double>(nx) * static_cast<double>(ny);
  const double total = static_cast<double>(nx + ny);
  const double u = static_cast<double>(nx) * ux + static_cast<double>(ny) * uy;
  TestResult res;
  res.test = "cvm";
  res.statistic = u / (k * total) - (4.0 * k - 1.0) / (6.0 * total);
  // Standardize T to the mean and variance of the one-sample limit law.
  const double mean = (1.0 + 1.0 / total) / 6.0;
  const double nx2 = static_cast<double>(nx) * static_cast<double>(nx);
  const double ny2 = static_cast<double>(ny) * static_cast<double>(ny);
  const double var = (total + 1.0) * (4.0 * k * total - 3.0 * (nx2 + ny2) - 2.0 * k) /
                     (45.0 * total * total * 4.0 * k);
  const double tn = 1.0 / 6.0 + (res.statistic - mean) / std::sqrt(45.0 * var);
  res.p_value = tn < 0.003 ? 1.0 : cvm_limit_sf(tn);
  return res;
}

TestResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "mann_whitney");
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  double r1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
  const double u1 = r1 - n1 * (n1 + 1.0) / 2.0;
  const double n = n1 + n2;
  const double mu = n1 * n2 / 2.0;

  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double sigma = std::sqrt(n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))));

  TestResult r;
  r.test = "mann_whitney";
  r.statistic = u1;
  const double u = std::max(u1, n1 * n2 - u1);
  if (sigma > 0.0) {
    const double z = (u - mu - 0.5) / sigma;
    r.p_value = std::min(1.0, 2.0 * normal_sf(z));
  }
  if (u1 < mu)
    r.direction = Direction::Less;
  else if (u1 > mu)
    r.direction = Direction::Greater;
  return r;
}

TercileWaits conditional_waiting_time(std::span<const TimedValue> series,
                                      std::span<const double> event_times) {
  if (!std::is_sorted(event_times.begin(), event_times.end()))
    throw std::invalid_argument("conditional_waiting_time: event times not ordered");
  std::vector<std::pair<double, double>> obs;  // (value, wait)
  double last_t = -std::numeric_limits<double>::infinity();
  for (const auto& p : series) {
    if (p.t < last_t) throw std::invalid_argument("conditional_waiting_time: series not ordered");
    last_t = p.t;
    const auto next = std::upper_bound(event_times.begin(), event_times.end(), p.t);
    if (next == event_times.end()) continue;
    obs.emplace_back(p.value, *next - p.t);
  }
  std::vector<double> values;
  values.reserve(obs.size());
  for (const auto& o : obs) values.push_back(o.first);
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t distinct = n ? 1 : 0;
  for (std::size_t i = 1; i < n; ++i) distinct += values[i] != values[i - 1];
  if (distinct < 3)
    throw std::invalid_argument("conditional_waiting_time: fewer than three distinct values");
  TercileWaits out;
  out.lower_bound = values[(n + 2) / 3 - 1];
  out.upper_bound = values[(2 * n + 2) / 3 - 1];
  std::array<double, 3> sums{};
  for (const auto& [v, wait] : obs) {
    const int k = v <= out.lower_bound ? 0 : v <= out.upper_bound ? 1 : 2;
    sums[k] += wait;
    ++out.count[k];
  }
  for (int k = 0; k < 3; ++k)
    out.mean_wait[k] = out.count[k] ? sums[k] / static_cast<double>(out.count[k])
                                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::vector<double> mid_price_variations(std::span<const TimedValue> series, double interval,
                                         std::optional<double> start, std::optional<double> end) {
  if (!(interval > 0.0)) throw std::invalid_argument("mid_price_variations: interval must be > 0");
  if (series.empty()) throw std::invalid_argument("mid_price_variations: empty series");
  const double t0 = start.value_or(series.front().t);
  const double t1 = end.value_or(series.back().t);
  if (t0 < series.front().t)
    throw std::invalid_argument("mid_price_variations: grid starts before the first observation");
  const auto points = static_cast<std::size_t>(std::floor((t1 - t0) / interval + 1e-9)) + 1;
  if (!(t1 >= t0) || points < 2)
    throw std::invalid_argument("mid_price_variations: series spans fewer than two sampling points");

  std::vector<double> out;
  out.reserve(points - 1);
  std::size_t idx = 0;
  double prev = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double g = t0 + static_cast<double>(k) * interval;
    while (idx + 1 < series.size() && series[idx + 1].t <= g) ++idx;
    const double v = series[idx].value;
    if (k > 0) out.push_back(v - prev);
    prev = v;
  }
  return out;
}

void write_pdf_csv(std::ostream& os, const EmpiricalPdf& pdf, Binning::Kind kind) {
  os << "x,density\n";
  const Eigen::ArrayXd x = pdf.centres(kind);
  for (Eigen::Index k = 0; k < pdf.bins(); ++k) os << fmt::format("{:.9g},{:.9g}\n", x(k), pdf.density(k));
}

void write_weighted_csv(std::ostream& os, const WeightedDistribution& dist) {
  os << "x,weight\n";
  for (const auto& [v, w] : dist.weights()) os << fmt::format("{:.9g},{:.9g}\n", v, w / dist.total());
}

void write_tests_csv(std::ostream& os, std::span<const TestResult> results) {
  os << "test,statistic,p_value,direction\n";
  for (const auto& r : results)
    os << fmt::format("{},{:.9g},{:.9g},{}\n", r.test, r.statistic, r.p_value, direction_name(r.direction));
}

}  // namespace hlob
