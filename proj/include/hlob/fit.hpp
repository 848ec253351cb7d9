#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "hlob/hawkes.hpp"

namespace hlob {

/// Which kernels of the order-flow model are fitted.
struct Structure {
  bool mm{false};
  bool lm{false};
  bool ll{false};

  /// Accepts "HP" or effects joined by '+' or ',' in any order, e.g. "MM+LL+LM".
  static Structure parse(std::string_view text);
  /// Canonical name: HP, LM, MM, MM+LL, MM+LM, MM+LL+LM (or LL, LL+LM).
  [[nodiscard]] std::string name() const;

  friend bool operator==(const Structure&, const Structure&) = default;
};

/// Natural-scale box for every model parameter. Rates in events/s, decays in 1/s.
struct ParameterBounds {
  double rate_lower{1e-8};
  double rate_upper{1e4};
  double alpha_lower{1e-6};
  double alpha_upper{1e3};
  double beta_lower{1e-4};
  double beta_upper{1e4};
  /// Self-excitation must satisfy alpha < stability_margin * beta.
  double stability_margin{0.999};
};

struct FitOptions {
  std::size_t max_evaluations{10000};
  /// Relative parameter step (log-parameter simplex size) at which to stop.
  double tolerance{1e-6};
};

struct FitResult {
  HawkesModelSpec spec;
  double log_likelihood{0.0};
  /// False if the simplex ran out of budget or the optimum lies on the
  /// parameter box or the stability limit (no interior maximum).
  bool converged{false};
  std::size_t iterations{0};
  std::size_t evaluations{0};
};

/// Starting point built from the stream's event counts.
HawkesModelSpec default_initial_guess(const EventStream& stream, const Structure& structure);

/// Maximum-likelihood fit of the enabled kernels. Market and limit components
/// have disjoint parameters, so each is maximized separately; a component with
/// no kernels gets the closed-form Poisson rate count / horizon.
/// Kernels enabled in `structure` but absent from `init` start from
/// default_initial_guess. Throws DataError on degenerate streams.
FitResult fit_mle(const EventStream& stream, const Structure& structure,
                  const HawkesModelSpec& init, const ParameterBounds& bounds = {},
                  const FitOptions& options = {});

inline FitResult fit_mle(const EventStream& stream, const Structure& structure) {
  return fit_mle(stream, structure, default_initial_guess(stream, structure));
}

}  // namespace hlob
