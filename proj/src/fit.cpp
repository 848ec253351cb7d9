#include "hlob/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "hlob/errors.hpp"
#include "hlob/nelder_mead.hpp"

namespace hlob {

Structure Structure::parse(std::string_view text) {
  Structure s;
  if (text == "HP" || text.empty()) return s;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("+, ", start);
    if (end == std::string_view::npos) end = text.size();
    const auto token = text.substr(start, end - start);
    if (token == "MM")
      s.mm = true;
    else if (token == "LM")
      s.lm = true;
    else if (token == "LL")
      s.ll = true;
    else if (!token.empty())
      throw std::invalid_argument(fmt::format("unknown effect '{}' in structure '{}'", token, text));
    start = end + 1;
  }
  return s;
}

std::string Structure::name() const {
  std::string out;
  auto add = [&](bool on, const char* n) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += n;
  };
  add(mm, "MM");
  add(ll, "LL");
  add(lm, "LM");
  return out.empty() ? "HP" : out;
}

HawkesModelSpec default_initial_guess(const EventStream& stream, const Structure& structure) {
  const double horizon = stream.horizon();
  const double market_rate = std::max(stream.count(Mark::Market) / horizon, 1e-3);
  const double limit_rate = std::max(stream.count(Mark::Limit) / horizon, 1e-3);
  HawkesModelSpec spec;
  spec.mu0 = structure.mm ? 0.5 * market_rate : market_rate;
  spec.lambda0 = (structure.lm || structure.ll) ? 0.5 * limit_rate : limit_rate;
  if (structure.mm) spec.kernel_mm = ExponentialKernel{1.0, 3.0};
  if (structure.lm) spec.kernel_lm = ExponentialKernel{1.0, 3.0};
  if (structure.ll) spec.kernel_ll = ExponentialKernel{1.0, 3.0};
  return spec;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ComponentFit {
  bool converged{true};
  std::size_t iterations{0};
  std::size_t evaluations{0};
};

bool rate_in(double v, const ParameterBounds& b) { return v >= b.rate_lower && v <= b.rate_upper; }

bool kernel_in(const ExponentialKernel& k, const ParameterBounds& b, bool self_exciting) {
  if (!(k.alpha >= b.alpha_lower && k.alpha <= b.alpha_upper)) return false;
  if (!(k.beta >= b.beta_lower && k.beta <= b.beta_upper)) return false;
  return !self_exciting || k.alpha < b.stability_margin * k.beta;
}

// True if a fitted value sits within 0.1% of its box or of the stability
// limit, i.e. the likelihood has no interior maximum inside the bounds.
bool near(double v, double bound) { return std::abs(v / bound - 1.0) < 1e-3; }

bool on_boundary(const HawkesModelSpec& s, const ParameterBounds& b) {
  auto rate = [&](double v) { return near(v, b.rate_lower) || near(v, b.rate_upper); };
  auto kernel = [&](const std::optional<ExponentialKernel>& k, bool self_exciting) {
    if (!k) return false;
    return near(k->alpha, b.alpha_lower) || near(k->alpha, b.alpha_upper) ||
           near(k->beta, b.beta_lower) || near(k->beta, b.beta_upper) ||
           (self_exciting && near(k->branching_ratio(), b.stability_margin));
  };
  return rate(s.mu0) || rate(s.lambda0) || kernel(s.kernel_mm, true) || kernel(s.kernel_lm, false) ||
         kernel(s.kernel_ll, true);
}

// Minimizes `objective` from `start` with simplex restarts until a restart no
// longer improves the optimum, within a shared evaluation budget.
template <typename Objective>
ComponentFit minimize(Objective&& objective, Vector<double>& x, const FitOptions& options) {
  ComponentFit fit{false, 0, 0};
  double best = objective(x);
  fit.evaluations = 1;
  for (int round = 0; round < 8; ++round) {
    NelderMeadOptions nm;
    nm.x_tolerance = options.tolerance;
    nm.max_evaluations =
        options.max_evaluations > fit.evaluations ? options.max_evaluations - fit.evaluations : 0;
    nm.initial_step = round == 0 ? 0.1 : 0.02;
    if (nm.max_evaluations == 0) break;
    const auto r = nelder_mead<double>(objective, x, nm);
    fit.iterations += r.iterations;
    fit.evaluations += r.evaluations;
    const double improvement = best - r.value;
    if (r.value <= best) {
      x = r.x;
      best = r.value;
    }
    if (!r.converged) break;
    if (round > 0 && improvement <= 1e-9 * std::max(1.0, std::abs(best))) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace

FitResult fit_mle(const EventStream& stream, const Structure& structure,
                  const HawkesModelSpec& init, const ParameterBounds& bounds,
                  const FitOptions& options) {
  const double horizon = stream.horizon();
  if (!(horizon > 0.0)) throw DataError("event stream has non-positive horizon");
  const std::size_t n_market = stream.count(Mark::Market);
  const std::size_t n_limit = stream.count(Mark::Limit);
  if (n_market < 2) throw DataError(fmt::format("need >= 2 market events to fit (got {})", n_market));
  if ((structure.lm || structure.ll) && n_limit < 2)
    throw DataError(fmt::format("need >= 2 limit events to fit limit kernels (got {})", n_limit));

  const HawkesModelSpec fallback = default_initial_guess(stream, structure);
  HawkesModelSpec start = init;
  if (structure.mm && !start.kernel_mm) start.kernel_mm = fallback.kernel_mm;
  if (structure.lm && !start.kernel_lm) start.kernel_lm = fallback.kernel_lm;
  if (structure.ll && !start.kernel_ll) start.kernel_ll = fallback.kernel_ll;
  if (!structure.lm && !structure.ll && !(start.lambda0 > 0.0)) start.lambda0 = fallback.lambda0;

  FitResult result;
  result.converged = true;
  HawkesModelSpec& spec = result.spec;

  // Market component: (mu0, alpha_MM, beta_MM).
  if (!structure.mm) {
    spec.mu0 = static_cast<double>(n_market) / horizon;
  } else {
    if (!rate_in(start.mu0, bounds) || !kernel_in(*start.kernel_mm, bounds, true))
      throw std::invalid_argument("initial market parameters outside bounds");
    EventStream market_only(horizon);
    for (const auto& e : stream.events())
      if (e.mark == Mark::Market) market_only.push_back(e.t, e.mark);
    auto unpack = [](const Vector<double>& x) {
      HawkesModelSpec s;
      s.mu0 = std::exp(x(0));
      s.kernel_mm = ExponentialKernel{std::exp(x(1)), std::exp(x(2))};
      return s;
    };
    auto objective = [&](const Vector<double>& x) {
      const HawkesModelSpec s = unpack(x);
      if (!rate_in(s.mu0, bounds) || !kernel_in(*s.kernel_mm, bounds, true)) return kInf;
      return -component_log_likelihood(s, market_only, Mark::Market);
    };
    Vector<double> x(3);
    x << std::log(start.mu0), std::log(start.kernel_mm->alpha), std::log(start.kernel_mm->beta);
    const ComponentFit f = minimize(objective, x, options);
    const HawkesModelSpec s = unpack(x);
    spec.mu0 = s.mu0;
    spec.kernel_mm = s.kernel_mm;
    result.converged = result.converged && f.converged;
    result.iterations += f.iterations;
    result.evaluations += f.evaluations;
  }

  // Limit component: (lambda0, [alpha_LM, beta_LM], [alpha_LL, beta_LL]).
  if (!structure.lm && !structure.ll) {
    spec.lambda0 = static_cast<double>(n_limit) / horizon;
  } else {
    if (!rate_in(start.lambda0, bounds)) throw std::invalid_argument("initial lambda0 outside bounds");
    if (structure.lm && !kernel_in(*start.kernel_lm, bounds, false))
      throw std::invalid_argument("initial LM kernel outside bounds");
    if (structure.ll && !kernel_in(*start.kernel_ll, bounds, true))
      throw std::invalid_argument("initial LL kernel outside bounds");
    auto unpack = [&](const Vector<double>& x) {
      HawkesModelSpec s;
      s.mu0 = 1.0;
      s.lambda0 = std::exp(x(0));
      Eigen::Index k = 1;
      if (structure.lm) {
        s.kernel_lm = ExponentialKernel{std::exp(x(k)), std::exp(x(k + 1))};
        k += 2;
      }
      if (structure.ll) s.kernel_ll = ExponentialKernel{std::exp(x(k)), std::exp(x(k + 1))};
      return s;
    };
    auto objective = [&](const Vector<double>& x) {
      const HawkesModelSpec s = unpack(x);
      if (!rate_in(s.lambda0, bounds)) return kInf;
      if (s.kernel_lm && !kernel_in(*s.kernel_lm, bounds, false)) return kInf;
      if (s.kernel_ll && !kernel_in(*s.kernel_ll, bounds, true)) return kInf;
      return -component_log_likelihood(s, stream, Mark::Limit);
    };
    Vector<double> x(1 + 2 * (structure.lm + structure.ll));
    x(0) = std::log(start.lambda0);
    Eigen::Index k = 1;
    if (structure.lm) {
      x(k++) = std::log(start.kernel_lm->alpha);
      x(k++) = std::log(start.kernel_lm->beta);
    }
    if (structure.ll) {
      x(k++) = std::log(start.kernel_ll->alpha);
      x(k++) = std::log(start.kernel_ll->beta);
    }
    const ComponentFit f = minimize(objective, x, options);
    const HawkesModelSpec s = unpack(x);
    spec.lambda0 = s.lambda0;
    spec.kernel_lm = s.kernel_lm;
    spec.kernel_ll = s.kernel_ll;
    result.converged = result.converged && f.converged;
    result.iterations += f.iterations;
    result.evaluations += f.evaluations;
  }

  if (on_boundary(spec, bounds)) result.converged = false;
  result.log_likelihood = log_likelihood(spec, stream);
  return result;
}

}  // namespace hlob
