#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gramme/attention.hpp"
#include "gramme/graph.hpp"

namespace gramme {

enum class Variant { kSg, kFusion };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct ModelConfig {
  Variant variant = Variant::kFusion;
  int attention_layers = 2;     // stacked attention layers (T)
  int heads = 2;                // attention heads per layer (H)
  int supra_fusion_heads = 5;   // fusion heads in the supra fusion layer (K)
  Eigen::Index feature_dim = 64;  // input feature dimension (D)
  Eigen::Index hidden_dim = 32;   // latent dimension (d)
  bool feed_forward_before_overall_fusion = false;
  /// Share one feature matrix across the layer-wise models (fusion) or
  /// across the copies of a node (supra graph). Defaults per variant:
  /// fusion shares, the supra model draws per-copy features.
  std::optional<bool> share_features;
  AttentionOptions attention;

  bool resolved_share_features() const {
    return share_features.value_or(variant == Variant::kFusion);
  }
  void validate() const;
};

template <typename Scalar>
struct SgModelParams {
  std::vector<AttentionLayerParams<Scalar>> layers;  // T entries
  Mat<Scalar> classifier_w;  // C x d
  Mat<Scalar> classifier_b;  // 1 x C
};

/// Layer-wise attention stacks plus the supra fusion layer: K fusion heads
/// with per-layer scaling vectors and an overall fusion head across the K
/// consensus candidates.
template <typename Scalar>
struct FusionModelParams {
  std::vector<std::vector<AttentionLayerParams<Scalar>>> stacks;  // L x T
  std::vector<Mat<Scalar>> gamma_raw;  // K entries, each L x 1
  Mat<Scalar> kappa_raw;               // K x 1
  bool supra_raw_is_effective = false;
  Mat<Scalar> ff_w;  // d x d, used when the feed-forward stage is enabled
  Mat<Scalar> ff_b;  // 1 x d
  bool use_feed_forward = false;
  Mat<Scalar> classifier_w;
  Mat<Scalar> classifier_b;
};

template <typename Scalar>
SgModelParams<Scalar> init_sg_params(const ModelConfig& config, int n_classes, Rng& rng) {
  SgModelParams<Scalar> p;
  for (int t = 0; t < config.attention_layers; ++t) {
    const Eigen::Index in = (t == 0) ? config.feature_dim : config.hidden_dim;
    p.layers.push_back(
        init_attention_layer<Scalar>(in, config.hidden_dim, config.heads, rng));
  }
  p.classifier_w = glorot_uniform<Scalar>(n_classes, config.hidden_dim, rng);
  p.classifier_b = Mat<Scalar>::Zero(1, n_classes);
  return p;
}

template <typename Scalar>
FusionModelParams<Scalar> init_fusion_params(const ModelConfig& config, int n_layers,
                                             int n_classes, Rng& rng) {
  FusionModelParams<Scalar> p;
  for (int l = 0; l < n_layers; ++l) {
    std::vector<AttentionLayerParams<Scalar>> stack;
    for (int t = 0; t < config.attention_layers; ++t) {
      const Eigen::Index in = (t == 0) ? config.feature_dim : config.hidden_dim;
      stack.push_back(init_attention_layer<Scalar>(in, config.hidden_dim, config.heads, rng));
    }
    p.stacks.push_back(std::move(stack));
  }
  const Scalar gamma0 = static_cast<Scalar>(softplus_inverse(1.0 / n_layers));
  for (int k = 0; k < config.supra_fusion_heads; ++k)
    p.gamma_raw.push_back(Mat<Scalar>::Constant(n_layers, 1, gamma0));
  p.kappa_raw = Mat<Scalar>::Constant(
      config.supra_fusion_heads, 1,
      static_cast<Scalar>(softplus_inverse(1.0 / config.supra_fusion_heads)));
  p.use_feed_forward = config.feed_forward_before_overall_fusion;
  if (p.use_feed_forward) {
    p.ff_w = glorot_uniform<Scalar>(config.hidden_dim, config.hidden_dim, rng);
    p.ff_b = Mat<Scalar>::Zero(1, config.hidden_dim);
  }
  p.classifier_w = glorot_uniform<Scalar>(n_classes, config.hidden_dim, rng);
  p.classifier_b = Mat<Scalar>::Zero(1, n_classes);
  return p;
}

/// Stable iteration over every trainable tensor, used by the optimizer,
/// checkpoints and gradient checks alike.
template <typename Scalar, typename Fn>
void visit_params(SgModelParams<Scalar>& p, Fn&& fn) {
  for (std::size_t t = 0; t < p.layers.size(); ++t) {
    auto& layer = p.layers[t];
    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      fn("layer" + std::to_string(t) + ".head" + std::to_string(h) + ".W",
         layer.heads[h].weight);
      fn("layer" + std::to_string(t) + ".head" + std::to_string(h) + ".A", layer.heads[h].attn);
    }
    fn("layer" + std::to_string(t) + ".fusion", layer.fusion.raw);
  }
  fn("classifier.W", p.classifier_w);
  fn("classifier.b", p.classifier_b);
}

template <typename Scalar, typename Fn>
void visit_params(FusionModelParams<Scalar>& p, Fn&& fn) {
  for (std::size_t l = 0; l < p.stacks.size(); ++l) {
    for (std::size_t t = 0; t < p.stacks[l].size(); ++t) {
      auto& layer = p.stacks[l][t];
      const std::string prefix =
          "stack" + std::to_string(l) + ".layer" + std::to_string(t) + ".";
      for (std::size_t h = 0; h < layer.heads.size(); ++h) {
        fn(prefix + "head" + std::to_string(h) + ".W", layer.heads[h].weight);
        fn(prefix + "head" + std::to_string(h) + ".A", layer.heads[h].attn);
      }
      fn(prefix + "fusion", layer.fusion.raw);
    }
  }
  for (std::size_t k = 0; k < p.gamma_raw.size(); ++k)
    fn("supra.gamma" + std::to_string(k), p.gamma_raw[k]);
  fn("supra.kappa", p.kappa_raw);
  if (p.use_feed_forward) {
    fn("supra.ff.W", p.ff_w);
    fn("supra.ff.b", p.ff_b);
  }
  fn("classifier.W", p.classifier_w);
  fn("classifier.b", p.classifier_b);
}

template <typename Scalar>
struct ForwardResult {
  ad::Var<Scalar> logits;     // N x C
  ad::Var<Scalar> embedding;  // N x d, pre-classifier representation
  BoundParams<Scalar> bound;
};

/// Segment map sending supra row l*N + i to node id i.
IndexVec across_layer_segments(Index n_nodes, int n_layers);

/// Mean over the L copies of each node id.
template <typename Scalar>
ad::Var<Scalar> across_layer_pool(ad::Var<Scalar> z_supra, std::span<const Index> segments,
                                  Index n_nodes, int n_layers) {
  if (z_supra.rows() != static_cast<Eigen::Index>(n_nodes) * n_layers)
    throw ShapeError("across_layer_pool: expected " +
                     std::to_string(static_cast<long>(n_nodes) * n_layers) + " rows, got " +
                     std::to_string(z_supra.rows()));
  return ad::div_scalar(ad::segment_sum(z_supra, segments, n_nodes),
                        static_cast<Scalar>(n_layers));
}

template <typename Scalar>
ad::Var<Scalar> classifier_logits(ad::Var<Scalar> embedding, BoundParams<Scalar>& bound,
                                  Mat<Scalar>& weight, Mat<Scalar>& bias) {
  return ad::add_row_broadcast(ad::matmul(embedding, ad::transpose(bound.bind(weight))),
                               bound.bind(bias));
}

/// Supra-graph model: T attention layers over intra plus pillar edges,
/// across-layer average pooling, linear classifier.
template <typename Scalar>
ForwardResult<Scalar> gramme_sg_forward(ad::Tape<Scalar>& tape, const Adjacency& supra_adj,
                                        const Mat<Scalar>& supra_features,
                                        SgModelParams<Scalar>& params,
                                        const AttentionOptions& options, Index n_nodes,
                                        int n_layers, std::span<const Index> pool_segments) {
  if (supra_features.rows() != static_cast<Eigen::Index>(n_nodes) * n_layers)
    throw ShapeError("gramme_sg_forward: feature rows " +
                     std::to_string(supra_features.rows()) + " != supra node count " +
                     std::to_string(static_cast<long>(n_nodes) * n_layers));
  ForwardResult<Scalar> r;
  r.bound.tape = &tape;
  ad::Var<Scalar> z = tape.constant(supra_features);
  for (auto& layer : params.layers)
    z = attention_layer_forward(z, supra_adj, r.bound, layer, options);
  r.embedding = across_layer_pool<Scalar>(z, pool_segments, n_nodes, n_layers);
  r.logits = classifier_logits(r.embedding, r.bound, params.classifier_w, params.classifier_b);
  return r;
}

/// Layer-wise attention stacks, K supra fusion heads over the layer
/// representations, an overall fusion head, then the classifier.
template <typename Scalar>
ForwardResult<Scalar> gramme_fusion_forward(ad::Tape<Scalar>& tape,
                                            const std::vector<Adjacency>& layer_adjacency,
                                            const std::vector<const Mat<Scalar>*>& features,
                                            FusionModelParams<Scalar>& params,
                                            const AttentionOptions& options) {
  const std::size_t n_layers = layer_adjacency.size();
  if (params.stacks.size() != n_layers)
    throw ShapeError("gramme_fusion_forward: " + std::to_string(params.stacks.size()) +
                     " stacks for " + std::to_string(n_layers) + " layers");
  if (features.size() != 1 && features.size() != n_layers)
    throw ShapeError("gramme_fusion_forward: need one shared or one per-layer feature matrix");

  ForwardResult<Scalar> r;
  r.bound.tape = &tape;

  std::vector<ad::Var<Scalar>> layer_reps;
  layer_reps.reserve(n_layers);
  ad::Var<Scalar> shared;
  if (features.size() == 1) shared = tape.constant(*features[0]);
  for (std::size_t l = 0; l < n_layers; ++l) {
    ad::Var<Scalar> z = features.size() == 1 ? shared : tape.constant(*features[l]);
    for (auto& layer : params.stacks[l])
      z = attention_layer_forward(z, layer_adjacency[l], r.bound, layer, options);
    layer_reps.push_back(z);
  }

  std::vector<ad::Var<Scalar>> consensus_parts;
  consensus_parts.reserve(params.gamma_raw.size());
  for (Mat<Scalar>& gamma : params.gamma_raw) {
    ad::Var<Scalar> raw = r.bound.bind(gamma);
    ad::Var<Scalar> eff = params.supra_raw_is_effective ? raw : ad::softplus(raw);
    ad::Var<Scalar> s = ad::weighted_sum(eff, layer_reps);
    if (params.use_feed_forward) {
      s = ad::elu(ad::add_row_broadcast(ad::matmul(s, ad::transpose(r.bound.bind(params.ff_w))),
                                        r.bound.bind(params.ff_b)));
    }
    consensus_parts.push_back(s);
  }
  ad::Var<Scalar> kappa_raw = r.bound.bind(params.kappa_raw);
  ad::Var<Scalar> kappa =
      params.supra_raw_is_effective ? kappa_raw : ad::softplus(kappa_raw);
  r.embedding = ad::weighted_sum(kappa, consensus_parts);
  r.logits = classifier_logits(r.embedding, r.bound, params.classifier_w, params.classifier_b);
  return r;
}

}  // namespace gramme
