#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace hlob {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct NelderMeadOptions {
  double initial_step = 0.1;
  /// Stop once every vertex lies within this distance (max-norm) of the best.
  double x_tolerance = 1e-6;
  std::size_t max_evaluations = 10000;
};

template <typename Scalar>
struct NelderMeadResult {
  Vector<Scalar> x;
  Scalar value{std::numeric_limits<Scalar>::infinity()};
  std::size_t iterations{0};
  std::size_t evaluations{0};
  bool converged{false};
};

/// Minimizes f over R^n with the Nelder-Mead simplex method (standard
/// coefficients 1, 2, 1/2, 1/2). f may return +inf to reject a point. The best
/// vertex value is non-increasing over iterations.
template <typename Scalar, typename Objective>
NelderMeadResult<Scalar> nelder_mead(Objective&& f, const Vector<Scalar>& start,
                                     const NelderMeadOptions& options = {}) {
  const Eigen::Index n = start.size();
  NelderMeadResult<Scalar> result;
  result.x = start;

  auto eval = [&](const Vector<Scalar>& x) {
    ++result.evaluations;
    const Scalar v = f(x);
    return std::isnan(v) ? std::numeric_limits<Scalar>::infinity() : v;
  };

  if (n == 0) {
    result.value = eval(start);
    result.converged = true;
    return result;
  }

  std::vector<Vector<Scalar>> simplex(n + 1, start);
  std::vector<Scalar> values(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) simplex[i + 1](i) += Scalar(options.initial_step);
  for (Eigen::Index i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    Scalar spread = 0;
    for (const auto& v : simplex) spread = std::max(spread, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (spread < Scalar(options.x_tolerance) && std::isfinite(values[best])) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;
    ++result.iterations;

    Vector<Scalar> centroid = Vector<Scalar>::Zero(n);
    for (std::size_t i : order)
      if (i != worst) centroid += simplex[i];
    centroid /= Scalar(n);

    const Vector<Scalar> reflected = centroid + (centroid - simplex[worst]);
    const Scalar f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Vector<Scalar> expanded = centroid + Scalar(2) * (centroid - simplex[worst]);
      const Scalar f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Vector<Scalar> contracted =
        outside ? Vector<Scalar>(centroid + Scalar(0.5) * (reflected - centroid))
                : Vector<Scalar>(centroid + Scalar(0.5) * (simplex[worst] - centroid));
    const Scalar f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + Scalar(0.5) * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  return result;
}

}  // namespace hlob
