#pragma once

#include <string>
#include <vector>

#include "gramme/ad/ops.hpp"
#include "gramme/graph.hpp"
#include "gramme/rng.hpp"

namespace gramme {

/// One attention head: shared linear transform plus the scoring vector for
/// the scalar dot-product attention over concatenated endpoint features.
template <typename Scalar>
struct AttentionHeadParams {
  Mat<Scalar> weight;  // out_dim x in_dim
  Mat<Scalar> attn;    // 2*out_dim x 1
};

/// Trainable nonnegative head weighting. Effective weights are
/// softplus(raw); raw_is_effective bypasses the reparameterization so
/// weights can be pinned (uniform baselines, one-hot selection).
template <typename Scalar>
struct FusionHeadParams {
  Mat<Scalar> raw;  // H x 1
  bool raw_is_effective = false;
};

template <typename Scalar>
struct AttentionLayerParams {
  std::vector<AttentionHeadParams<Scalar>> heads;
  FusionHeadParams<Scalar> fusion;
};

struct AttentionOptions {
  /// Slope of the leaky activation applied to edge logits before the
  /// per-destination softmax; set logit_activation=false for raw logits.
  double logit_slope = 0.2;
  bool logit_activation = true;
  enum class Sigma { kElu, kNone };
  Sigma sigma = Sigma::kElu;
  /// Normalize head fusion weights onto the simplex (off by default).
  bool normalize_fusion = false;
};

/// Parameter handles registered on one tape, paired with their storage so
/// an optimizer can map gradients back.
template <typename Scalar>
struct BoundParams {
  ad::Tape<Scalar>* tape = nullptr;
  std::vector<std::pair<Mat<Scalar>*, ad::Var<Scalar>>> entries;

  ad::Var<Scalar> bind(Mat<Scalar>& storage) {
    ad::Var<Scalar> v = tape->parameter(storage);
    entries.emplace_back(&storage, v);
    return v;
  }
};

template <typename Scalar>
struct BoundHead {
  ad::Var<Scalar> weight;
  ad::Var<Scalar> attn;
};

template <typename Scalar>
BoundHead<Scalar> bind_head(BoundParams<Scalar>& bound, AttentionHeadParams<Scalar>& p) {
  return {bound.bind(p.weight), bound.bind(p.attn)};
}

/// Effective fusion weights as a tape var (softplus of the raw parameter
/// unless the weights are pinned).
template <typename Scalar>
ad::Var<Scalar> bind_fusion_weights(BoundParams<Scalar>& bound, FusionHeadParams<Scalar>& p) {
  ad::Var<Scalar> raw = bound.bind(p.raw);
  return p.raw_is_effective ? raw : ad::softplus(raw);
}

/// Single head over the given edge view: linear transform, per-edge scalar
/// dot-product logits, per-destination softmax, weighted neighbor sum, and
/// the output nonlinearity. The logits use the split form
/// <A, x_i || x_j> = <A_top, x_i> + <A_bot, x_j>, which avoids materializing
/// the per-edge concatenation.
template <typename Scalar>
ad::Var<Scalar> attention_head_forward(ad::Var<Scalar> features, const Adjacency& adj,
                                       const BoundHead<Scalar>& head,
                                       const AttentionOptions& options) {
  if (features.rows() != adj.n_nodes)
    throw ShapeError("attention_head_forward: " + std::to_string(features.rows()) +
                     " feature rows for " + std::to_string(adj.n_nodes) + " nodes");
  if (!adj.self_loops) {
    std::vector<bool> covered(static_cast<std::size_t>(adj.n_nodes), false);
    for (Index v : adj.agg) covered[static_cast<std::size_t>(v)] = true;
    for (Index v = 0; v < adj.n_nodes; ++v) {
      if (!covered[static_cast<std::size_t>(v)])
        throw DataError("attention_head_forward: node " + std::to_string(v) +
                        " has no incident edges and self-edges are disabled");
    }
  }

  const Eigen::Index d = head.weight.rows();
  ad::Var<Scalar> transformed = ad::matmul(features, ad::transpose(head.weight));
  ad::Var<Scalar> score_agg = ad::matmul(transformed, ad::slice_rows(head.attn, 0, d));
  ad::Var<Scalar> score_nbr = ad::matmul(transformed, ad::slice_rows(head.attn, d, d));
  ad::Var<Scalar> logits =
      ad::add(ad::gather_rows(score_agg, adj.agg), ad::gather_rows(score_nbr, adj.nbr));
  if (options.logit_activation)
    logits = ad::leaky_relu(logits, static_cast<Scalar>(options.logit_slope));
  ad::Var<Scalar> alpha = ad::segment_softmax(logits, adj.agg, adj.n_nodes);
  ad::Var<Scalar> combined =
      ad::segment_weighted_sum(alpha, transformed, adj.nbr, adj.agg, adj.n_nodes);
  return options.sigma == AttentionOptions::Sigma::kElu ? ad::elu(combined) : combined;
}

/// Weighted combination of same-shaped head outputs (no normalization
/// constraint on the weights).
template <typename Scalar>
ad::Var<Scalar> fusion_combine(ad::Var<Scalar> effective_weights,
                               const std::vector<ad::Var<Scalar>>& head_outputs) {
  return ad::weighted_sum(effective_weights, head_outputs);
}

/// H heads plus a fusion head. The fused output keeps width d, so stacked
/// layers all run at the hidden dimension.
template <typename Scalar>
ad::Var<Scalar> attention_layer_forward(ad::Var<Scalar> features, const Adjacency& adj,
                                        BoundParams<Scalar>& bound,
                                        AttentionLayerParams<Scalar>& params,
                                        const AttentionOptions& options) {
  if (params.heads.empty()) throw ShapeError("attention_layer_forward: no heads");
  std::vector<ad::Var<Scalar>> outputs;
  outputs.reserve(params.heads.size());
  for (AttentionHeadParams<Scalar>& head : params.heads) {
    BoundHead<Scalar> bh = bind_head(bound, head);
    outputs.push_back(attention_head_forward(features, adj, bh, options));
  }
  ad::Var<Scalar> beta = bind_fusion_weights(bound, params.fusion);
  if (options.normalize_fusion) beta = ad::simplex_normalize(beta);
  return fusion_combine(beta, outputs);
}

inline double softplus_inverse(double y) { return std::log(std::expm1(y)); }

template <typename Scalar>
Mat<Scalar> glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Mat<Scalar> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = static_cast<Scalar>((2.0 * rng.unit() - 1.0) * limit);
  }
  return m;
}

/// Glorot-uniform head parameters; fusion weights start uniform at 1/H.
template <typename Scalar>
AttentionLayerParams<Scalar> init_attention_layer(Eigen::Index in_dim, Eigen::Index out_dim,
                                                  int n_heads, Rng& rng) {
  AttentionLayerParams<Scalar> p;
  for (int h = 0; h < n_heads; ++h) {
    AttentionHeadParams<Scalar> head;
    head.weight = glorot_uniform<Scalar>(out_dim, in_dim, rng);
    head.attn = glorot_uniform<Scalar>(2 * out_dim, 1, rng);
    p.heads.push_back(std::move(head));
  }
  p.fusion.raw = Mat<Scalar>::Constant(
      n_heads, 1, static_cast<Scalar>(softplus_inverse(1.0 / n_heads)));
  return p;
}

}  // namespace gramme
