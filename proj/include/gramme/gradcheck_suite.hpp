#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gramme/ad/gradcheck.hpp"
#include "gramme/ad/ops.hpp"
#include "gramme/harness.hpp"
#include "gramme/rng.hpp"

namespace gramme {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
};

namespace detail {

inline Matd random_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = 2.0 * rng.unit() - 1.0;
  return m;
}

/// Checks one op expression: params are registered on a fresh tape per
/// evaluation and the expression is reduced to a scalar with sum().
inline double check_expression(
    std::vector<Matd>& storage,
    const std::function<ad::Var<double>(ad::Tape<double>&, std::vector<ad::Var<double>>&)>&
        expression) {
  std::vector<Matd*> params;
  for (Matd& m : storage) params.push_back(&m);

  auto build = [&](ad::Tape<double>& tape) {
    std::vector<ad::Var<double>> vars;
    for (Matd& m : storage) vars.push_back(tape.parameter(m));
    ad::Var<double> out = expression(tape, vars);
    return out.rows() == 1 && out.cols() == 1 ? out : ad::sum(out);
  };
  auto eval = [&]() {
    ad::Tape<double> tape;
    return build(tape).value()(0, 0);
  };
  auto grads = [&]() {
    ad::Tape<double> tape;
    std::vector<ad::Var<double>> vars;
    for (Matd& m : storage) vars.push_back(tape.parameter(m));
    ad::Var<double> out = expression(tape, vars);
    ad::Var<double> loss = out.rows() == 1 && out.cols() == 1 ? out : ad::sum(out);
    tape.backward(loss);
    std::vector<Matd> g;
    for (const auto& v : vars) g.push_back(tape.grad_of(v.id()));
    return g;
  };
  return ad::finite_diff_check<double>(params, eval, grads);
}

}  // namespace detail

/// Randomized-shape gradient checks for every differentiable op.
inline std::vector<GradCheckEntry> gradcheck_ops(int trials, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckEntry> report;
  auto run =
      [&](const std::string& name,
          const std::function<double(Rng&)>& one_trial) {
        GradCheckEntry e{name, 0.0};
        for (int t = 0; t < trials; ++t) e.max_rel_error = std::max(e.max_rel_error, one_trial(rng));
        report.push_back(e);
      };

  auto dims = [](Rng& r) { return static_cast<Eigen::Index>(2 + r.below(4)); };

  run("matmul", [&dims](Rng& r) {
    const auto m = dims(r), k = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, k, r), detail::random_mat(k, n, r)};
    return detail::check_expression(s, [](auto& t, auto& v) { return ad::matmul(v[0], v[1]); });
  });
  run("transpose", [&dims](Rng& r) {
    std::vector<Matd> s{detail::random_mat(dims(r), dims(r), r)};
    return detail::check_expression(s, [](auto& t, auto& v) {
      return ad::matmul(ad::transpose(v[0]), v[0]);
    });
  });
  run("add", [&dims](Rng& r) {
    const auto m = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, n, r), detail::random_mat(m, n, r)};
    return detail::check_expression(s, [](auto& t, auto& v) { return ad::add(v[0], v[1]); });
  });
  run("sub", [&dims](Rng& r) {
    const auto m = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, n, r), detail::random_mat(m, n, r)};
    return detail::check_expression(s, [](auto& t, auto& v) { return ad::sub(v[0], v[1]); });
  });
  run("scale", [&dims](Rng& r) {
    std::vector<Matd> s{detail::random_mat(dims(r), dims(r), r)};
    return detail::check_expression(s,
                                    [](auto& t, auto& v) { return ad::scale(v[0], 1.7); });
  });
  run("div_scalar", [&dims](Rng& r) {
    std::vector<Matd> s{detail::random_mat(dims(r), dims(r), r)};
    return detail::check_expression(s,
                                    [](auto& t, auto& v) { return ad::div_scalar(v[0], 3.0); });
  });
  run("add_row_broadcast", [&dims](Rng& r) {
    const auto m = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, n, r), detail::random_mat(1, n, r)};
    return detail::check_expression(
        s, [](auto& t, auto& v) { return ad::add_row_broadcast(v[0], v[1]); });
  });
  run("slice_rows", [&dims](Rng& r) {
    const auto m = 2 + dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, n, r)};
    return detail::check_expression(
        s, [m](auto& t, auto& v) { return ad::slice_rows(v[0], 1, m - 2); });
  });
  run("gather_rows", [&dims](Rng& r) {
    const auto m = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, n, r)};
    auto idx = std::make_shared<IndexVec>();
    for (int e = 0; e < 6; ++e) idx->push_back(static_cast<Index>(r.below(m)));
    return detail::check_expression(
        s, [idx](auto& t, auto& v) { return ad::gather_rows(v[0], *idx); });
  });
  run("concat_pairs", [&dims](Rng& r) {
    const auto m = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(m, n, r)};
    auto first = std::make_shared<IndexVec>();
    auto second = std::make_shared<IndexVec>();
    for (int e = 0; e < 6; ++e) {
      first->push_back(static_cast<Index>(r.below(m)));
      second->push_back(static_cast<Index>(r.below(m)));
    }
    return detail::check_expression(s, [first, second](auto& t, auto& v) {
      return ad::concat_pairs(v[0], *first, *second);
    });
  });
  run("leaky_relu", [&dims](Rng& r) {
    std::vector<Matd> s{detail::random_mat(dims(r), dims(r), r)};
    return detail::check_expression(
        s, [](auto& t, auto& v) { return ad::leaky_relu(v[0], 0.2); });
  });
  run("elu", [&dims](Rng& r) {
    std::vector<Matd> s{detail::random_mat(dims(r), dims(r), r)};
    return detail::check_expression(s, [](auto& t, auto& v) { return ad::elu(v[0]); });
  });
  run("softplus", [&dims](Rng& r) {
    std::vector<Matd> s{detail::random_mat(dims(r), dims(r), r)};
    return detail::check_expression(s, [](auto& t, auto& v) { return ad::softplus(v[0]); });
  });
  run("simplex_normalize", [](Rng& r) {
    Matd v = detail::random_mat(4, 1, r);
    v.array() += 2.0;  // keep the sum away from zero
    std::vector<Matd> s{v};
    return detail::check_expression(s, [](auto& t, auto& v_) {
      return ad::matmul(ad::transpose(v_[0]), ad::simplex_normalize(v_[0]));
    });
  });
  run("segment_sum", [&dims](Rng& r) {
    const auto n = dims(r);
    std::vector<Matd> s{detail::random_mat(7, n, r)};
    auto seg = std::make_shared<IndexVec>(IndexVec{0, 0, 1, 1, 2, 2, 2});
    return detail::check_expression(
        s, [seg](auto& t, auto& v) { return ad::segment_sum(v[0], *seg, 3); });
  });
  run("segment_softmax", [](Rng& r) {
    std::vector<Matd> s{detail::random_mat(7, 1, r), detail::random_mat(7, 1, r)};
    auto seg = std::make_shared<IndexVec>(IndexVec{0, 0, 0, 1, 1, 2, 2});
    // Dot against a second vector so every coefficient matters.
    return detail::check_expression(s, [seg](auto& t, auto& v) {
      return ad::matmul(ad::transpose(ad::segment_softmax(v[0], *seg, 3)), v[1]);
    });
  });
  run("segment_weighted_sum", [&dims](Rng& r) {
    const auto n = dims(r);
    std::vector<Matd> s{detail::random_mat(6, 1, r), detail::random_mat(4, n, r)};
    auto rows = std::make_shared<IndexVec>(IndexVec{0, 1, 2, 3, 1, 2});
    auto seg = std::make_shared<IndexVec>(IndexVec{0, 0, 1, 1, 2, 2});
    return detail::check_expression(s, [rows, seg](auto& t, auto& v) {
      return ad::segment_weighted_sum(v[0], v[1], *rows, *seg, 3);
    });
  });
  run("weighted_sum", [&dims](Rng& r) {
    const auto m = dims(r), n = dims(r);
    std::vector<Matd> s{detail::random_mat(3, 1, r), detail::random_mat(m, n, r),
                        detail::random_mat(m, n, r), detail::random_mat(m, n, r)};
    return detail::check_expression(s, [](auto& t, auto& v) {
      return ad::weighted_sum(v[0], {v[1], v[2], v[3]});
    });
  });
  run("masked_cross_entropy", [](Rng& r) {
    std::vector<Matd> s{detail::random_mat(5, 3, r)};
    auto labels = std::make_shared<std::vector<int>>(std::vector<int>{0, 2, 1, 0, 2});
    auto mask = std::make_shared<IndexVec>(IndexVec{0, 2, 4});
    return detail::check_expression(s, [labels, mask](auto& t, auto& v) {
      return ad::masked_cross_entropy(v[0], *labels, *mask);
    });
  });
  return report;
}

/// Fixture for the end-to-end model checks: 6 nodes, 2 layers, 2 classes.
inline MultiLayerGraph gradcheck_fixture() {
  MultiLayerGraph g;
  g.n_nodes = 6;
  g.n_classes = 2;
  g.labels = {0, 0, 0, 1, 1, 1};
  const std::vector<std::vector<std::pair<Index, Index>>> layer_edges = {
      {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {2, 3}},
      {{0, 2}, {1, 3}, {3, 5}, {4, 0}},
  };
  for (std::size_t l = 0; l < layer_edges.size(); ++l) {
    LayerGraph layer;
    layer.layer_id = static_cast<int>(l);
    layer.present.assign(6, true);
    for (auto [u, v] : layer_edges[l]) {
      layer.src.push_back(u);
      layer.dst.push_back(v);
      layer.src.push_back(v);
      layer.dst.push_back(u);
    }
    layer.counted_edges = layer.edge_count();
    g.layers.push_back(std::move(layer));
  }
  return g;
}

/// Gradient of the training loss of a full model against every parameter.
inline double gradcheck_model(Variant variant) {
  const MultiLayerGraph g = gradcheck_fixture();
  ModelConfig config;
  config.variant = variant;
  config.attention_layers = 2;
  config.heads = 2;
  config.supra_fusion_heads = 2;
  config.feature_dim = 5;
  config.hidden_dim = 4;
  Model model(g, config, 11, 13);

  const IndexVec mask{0, 2, 3, 5};
  const std::vector<int>& labels = g.labels;

  std::vector<Matd*> params;
  model.visit([&params](const std::string&, Matd& m) { params.push_back(&m); });

  auto eval = [&]() {
    ad::Tape<double> tape;
    ForwardResult<double> fwd = model.forward(tape);
    return ad::masked_cross_entropy(fwd.logits, labels, mask).value()(0, 0);
  };
  auto grads = [&]() {
    ad::Tape<double> tape;
    ForwardResult<double> fwd = model.forward(tape);
    ad::Var<double> loss = ad::masked_cross_entropy(fwd.logits, labels, mask);
    tape.backward(loss);
    std::map<const Matd*, Matd> by_storage;
    for (auto& [storage, var] : fwd.bound.entries) by_storage[storage] = tape.grad_of(var.id());
    std::vector<Matd> out;
    for (Matd* p : params) out.push_back(by_storage.at(p));
    return out;
  };
  return ad::finite_diff_check<double>(params, eval, grads);
}

/// Op sweep plus both end-to-end models; used by the gradcheck verb and the
/// acceptance suite.
inline std::vector<GradCheckEntry> run_gradcheck_suite(int trials = 10, std::uint64_t seed = 7) {
  std::vector<GradCheckEntry> report = gradcheck_ops(trials, seed);
  report.push_back({"model_sg_loss", gradcheck_model(Variant::kSg)});
  report.push_back({"model_fusion_loss", gradcheck_model(Variant::kFusion)});
  return report;
}

}  // namespace gramme
