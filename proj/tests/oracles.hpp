#pragma once

// Straight-line scalar recomputations used as oracles. These deliberately
// avoid the tape engine: plain loops, one edge at a time.

#include <cmath>
#include <utility>
#include <vector>

#include "gramme/attention.hpp"
#include "gramme/types.hpp"

namespace gramme::test {

/// neighbor_pairs holds (aggregator i, neighbor j) with j in N_i; the self
/// pair is added here, as the attention op does.
inline Matd oracle_attention_head(const Matd& features,
                                  std::vector<std::pair<Index, Index>> neighbor_pairs,
                                  const Matd& weight, const Matd& attn,
                                  const AttentionOptions& options) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = weight.rows();
  for (Index v = 0; v < n; ++v) neighbor_pairs.emplace_back(v, v);

  Matd transformed(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < features.cols(); ++c) acc += features(i, c) * weight(k, c);
      transformed(i, k) = acc;
    }
  }

  std::vector<double> logits(neighbor_pairs.size());
  for (std::size_t e = 0; e < neighbor_pairs.size(); ++e) {
    const auto [i, j] = neighbor_pairs[e];
    double acc = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) acc += attn(k, 0) * transformed(i, k);
    for (Eigen::Index k = 0; k < d; ++k) acc += attn(d + k, 0) * transformed(j, k);
    if (options.logit_activation && acc < 0.0) acc *= options.logit_slope;
    logits[e] = acc;
  }

  Matd out = Matd::Zero(n, d);
  for (Index i = 0; i < n; ++i) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < neighbor_pairs.size(); ++e) {
      if (neighbor_pairs[e].first == i) max_logit = std::max(max_logit, logits[e]);
    }
    double denom = 0.0;
    for (std::size_t e = 0; e < neighbor_pairs.size(); ++e) {
      if (neighbor_pairs[e].first == i) denom += std::exp(logits[e] - max_logit);
    }
    for (std::size_t e = 0; e < neighbor_pairs.size(); ++e) {
      if (neighbor_pairs[e].first != i) continue;
      const double alpha = std::exp(logits[e] - max_logit) / denom;
      for (Eigen::Index k = 0; k < d; ++k)
        out(i, k) += alpha * transformed(neighbor_pairs[e].second, k);
    }
  }
  if (options.sigma == AttentionOptions::Sigma::kElu) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) {
        if (out(i, k) < 0.0) out(i, k) = std::expm1(out(i, k));
      }
    }
  }
  return out;
}

inline Matd oracle_weighted_combine(const std::vector<Matd>& parts,
                                    const std::vector<double>& weights) {
  Matd out = Matd::Zero(parts[0].rows(), parts[0].cols());
  for (std::size_t h = 0; h < parts.size(); ++h) out += weights[h] * parts[h];
  return out;
}

}  // namespace gramme::test
