#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "gramme/types.hpp"

namespace gramme::ad {

/// Central-difference gradient check. `eval` recomputes the scalar function
/// at the current parameter values; `autodiff_grads` returns the engine's
/// gradients, one per parameter, at the same point. Returns the max over
/// all coordinates of |g_auto - g_fd| / max(1e-8, |g_auto| + |g_fd|).
template <typename Scalar>
double finite_diff_check(std::span<Mat<Scalar>* const> params,
                         const std::function<Scalar()>& eval,
                         const std::function<std::vector<Mat<Scalar>>()>& autodiff_grads,
                         Scalar eps = Scalar(1e-5)) {
  const std::vector<Mat<Scalar>> g_auto = autodiff_grads();
  if (g_auto.size() != params.size())
    throw ShapeError("finite_diff_check: gradient count does not match parameter count");

  double max_rel = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat<Scalar>& p = *params[i];
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        const Scalar saved = p(r, c);
        p(r, c) = saved + eps;
        const Scalar f_plus = eval();
        p(r, c) = saved - eps;
        const Scalar f_minus = eval();
        p(r, c) = saved;
        if (!std::isfinite(static_cast<double>(f_plus)) ||
            !std::isfinite(static_cast<double>(f_minus)))
          throw NumericError("finite_diff_check: non-finite evaluation");
        const double g_fd = (static_cast<double>(f_plus) - static_cast<double>(f_minus)) /
                            (2.0 * static_cast<double>(eps));
        const double g_ad = static_cast<double>(g_auto[i](r, c));
        const double rel =
            std::abs(g_ad - g_fd) / std::max(1e-8, std::abs(g_ad) + std::abs(g_fd));
        max_rel = std::max(max_rel, rel);
      }
    }
  }
  return max_rel;
}

}  // namespace gramme::ad
