#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gramme/types.hpp"

namespace gramme::ad {

template <typename Scalar>
struct AdamConfig {
  Scalar lr = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
  Scalar weight_decay = Scalar(0);  // classic L2 added to the gradient
};

template <typename Scalar>
struct AdamState {
  std::vector<Mat<Scalar>> m;
  std::vector<Mat<Scalar>> v;
  long t = 0;
};

/// One bias-corrected Adam update over a parameter list. Moment buffers are
/// allocated on the first call; the step counter increments before the bias
/// correction. Throws NumericError on non-finite gradients.
template <typename Scalar>
void adam_step(std::vector<Mat<Scalar>*>& params, const std::vector<const Mat<Scalar>*>& grads,
               AdamState<Scalar>& state, const AdamConfig<Scalar>& config) {
  if (params.size() != grads.size())
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params vs " +
                     std::to_string(grads.size()) + " grads");
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Mat<Scalar>* p : params) {
      state.m.push_back(Mat<Scalar>::Zero(p->rows(), p->cols()));
      state.v.push_back(Mat<Scalar>::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size())
    throw ShapeError("adam_step: state tracks " + std::to_string(state.m.size()) +
                     " params, got " + std::to_string(params.size()));

  ++state.t;
  const Scalar bc1 = Scalar(1) - std::pow(config.beta1, Scalar(state.t));
  const Scalar bc2 = Scalar(1) - std::pow(config.beta2, Scalar(state.t));

  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat<Scalar>& p = *params[i];
    const Mat<Scalar>& g_in = *grads[i];
    if (g_in.rows() != p.rows() || g_in.cols() != p.cols())
      throw ShapeError("adam_step: grad shape mismatch at param " + std::to_string(i));
    if (!g_in.allFinite())
      throw NumericError("adam_step: non-finite gradient at param " + std::to_string(i) +
                         " (step " + std::to_string(state.t) + ")");

    Mat<Scalar> g = g_in;
    if (config.weight_decay != Scalar(0)) g.noalias() += config.weight_decay * p;

    state.m[i] = config.beta1 * state.m[i] + (Scalar(1) - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i].array().matrix() +
                 (Scalar(1) - config.beta2) * g.array().square().matrix();
    p.array() -= config.lr * (state.m[i].array() / bc1) /
                 ((state.v[i].array() / bc2).sqrt() + config.eps);
  }
}

}  // namespace gramme::ad
