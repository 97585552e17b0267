#include <doctest.h>

#include <cmath>

#include "gramme/attention.hpp"
#include "gramme/ad/gradcheck.hpp"
#include "oracles.hpp"

using namespace gramme;
using ad::Tape;
using ad::Var;

namespace {

/// Path 0 - 1 - 2, symmetric stored edges; (agg, nbr) view of the same.
Adjacency path_adjacency() {
  const IndexVec src{0, 1, 1, 2};
  const IndexVec dst{1, 0, 2, 1};
  return Adjacency::from_edges(src, dst, 3, true);
}

std::vector<std::pair<Index, Index>> path_neighbor_pairs() {
  // Stored edge (u, v) means v aggregates u.
  return {{1, 0}, {0, 1}, {2, 1}, {1, 2}};
}

Matd small_features() {
  Matd x(3, 2);
  x << 0.3, -0.7, 1.1, 0.4, -0.2, 0.9;
  return x;
}

AttentionHeadParams<double> small_head(double scale) {
  AttentionHeadParams<double> p;
  p.weight = Matd(2, 2);
  p.weight << 0.5 * scale, -0.3 * scale, 0.2 * scale, 0.8 * scale;
  p.attn = Matd(4, 1);
  p.attn << 0.1, -0.2, 0.3, 0.05;
  return p;
}

}  // namespace

TEST_CASE("attention head matches the scalar oracle on the 3-node path") {
  const Matd x = small_features();
  AttentionHeadParams<double> params = small_head(1.0);
  const AttentionOptions options;

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  BoundHead<double> head = bind_head(bound, params);
  Var<double> z = attention_head_forward(t.constant(x), path_adjacency(), head, options);

  const Matd expected =
      test::oracle_attention_head(x, path_neighbor_pairs(), params.weight, params.attn, options);
  REQUIRE(z.rows() == 3);
  REQUIRE(z.cols() == 2);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index k = 0; k < 2; ++k)
      CHECK(z.value()(i, k) == doctest::Approx(expected(i, k)).epsilon(1e-12));
  }
}

TEST_CASE("isolated node reduces to sigma(W x)") {
  Matd x(2, 2);
  x << 0.4, -1.0, 0.0, 0.0;
  AttentionHeadParams<double> params = small_head(1.0);
  // Single stored edge between nodes 0 and 1 is absent: both are isolated.
  Adjacency adj = Adjacency::from_edges({}, {}, 2, true);

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  BoundHead<double> head = bind_head(bound, params);
  Var<double> z = attention_head_forward(t.constant(x), adj, head, AttentionOptions{});

  const Matd wx = x * params.weight.transpose();
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      const double v = wx(i, k);
      const double expected = v > 0.0 ? v : std::expm1(v);
      CHECK(z.value()(i, k) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("identical features on a complete graph give uniform attention") {
  const Eigen::Index n = 4;
  Matd x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) << 0.6, -0.1;
  IndexVec src, dst;
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (u == v) continue;
      src.push_back(u);
      dst.push_back(v);
    }
  }
  const Adjacency adj = Adjacency::from_edges(src, dst, static_cast<Index>(n), true);
  AttentionHeadParams<double> params = small_head(1.3);

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  BoundHead<double> head = bind_head(bound, params);
  Var<double> z = attention_head_forward(t.constant(x), adj, head, AttentionOptions{});

  // With equal inputs every neighbor contributes the same transformed row,
  // so the output equals sigma(W x) row-for-row.
  const Matd wx = x * params.weight.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      const double v = wx(i, k);
      const double expected = v > 0.0 ? v : std::expm1(v);
      CHECK(z.value()(i, k) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention weights are normalized per destination") {
  Rng rng(17);
  const Index n = 12;
  Matd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < 3; ++c) x(i, c) = 2.0 * rng.unit() - 1.0;
  IndexVec src, dst;
  for (int e = 0; e < 40; ++e) {
    const Index u = static_cast<Index>(rng.below(n)), v = static_cast<Index>(rng.below(n));
    if (u == v) continue;
    src.push_back(u);
    dst.push_back(v);
  }
  const Adjacency adj = Adjacency::from_edges(src, dst, n, true);

  AttentionHeadParams<double> params;
  params.weight = glorot_uniform<double>(4, 3, rng);
  params.attn = glorot_uniform<double>(8, 1, rng);

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  BoundHead<double> head = bind_head(bound, params);
  Var<double> transformed = ad::matmul(t.constant(x), ad::transpose(head.weight));
  Var<double> logits = ad::add(
      ad::gather_rows(ad::matmul(transformed, ad::slice_rows(head.attn, 0, 4)), adj.agg),
      ad::gather_rows(ad::matmul(transformed, ad::slice_rows(head.attn, 4, 4)), adj.nbr));
  Var<double> alpha = ad::segment_softmax(ad::leaky_relu(logits, 0.2), adj.agg, n);

  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index e = 0; e < alpha.rows(); ++e)
    totals[static_cast<std::size_t>(adj.agg[static_cast<std::size_t>(e)])] +=
        alpha.value()(e, 0);
  for (double s : totals) CHECK(std::abs(s - 1.0) < 1e-10);
}

TEST_CASE("attention is not symmetric across an edge") {
  // Distinct features at the endpoints produce alpha_ij != alpha_ji.
  Matd x(2, 2);
  x << 1.0, 0.0, 0.0, 1.0;
  AttentionHeadParams<double> params;
  params.weight = Matd::Identity(2, 2);
  params.attn = Matd(4, 1);
  params.attn << 1.0, 0.0, 0.0, 1.0;
  const Adjacency adj = Adjacency::from_edges({0, 1}, {1, 0}, 2, true);

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  BoundHead<double> head = bind_head(bound, params);
  Var<double> transformed = ad::matmul(t.constant(x), ad::transpose(head.weight));
  Var<double> logits = ad::add(
      ad::gather_rows(ad::matmul(transformed, ad::slice_rows(head.attn, 0, 2)), adj.agg),
      ad::gather_rows(ad::matmul(transformed, ad::slice_rows(head.attn, 2, 2)), adj.nbr));
  Var<double> alpha = ad::segment_softmax(ad::leaky_relu(logits, 0.2), adj.agg, 2);

  // Edge order: (agg=1, nbr=0), (agg=0, nbr=1), self 0, self 1.
  CHECK(alpha.value()(0, 0) != alpha.value()(1, 0));
}

TEST_CASE("attention head rejects degree-zero nodes without self edges") {
  Matd x = Matd::Ones(3, 2);
  const Adjacency adj = Adjacency::from_edges({0}, {1}, 3, false);
  AttentionHeadParams<double> params = small_head(1.0);
  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  BoundHead<double> head = bind_head(bound, params);
  CHECK_THROWS_AS(attention_head_forward(t.constant(x), adj, head, AttentionOptions{}),
                  DataError);
}

TEST_CASE("fusion combine selections and linearity") {
  Tape<double> t;
  Matd z1(2, 2), z2(2, 2);
  z1 << 1.0, 0.0, 0.25, -3.0;
  z2 << 0.0, 1.0, 8.0, 0.125;

  SUBCASE("one-hot weights select a head bitwise") {
    Matd w(2, 1);
    w << 1.0, 0.0;
    Var<double> out = fusion_combine(t.constant(w), {t.constant(z1), t.constant(z2)});
    CHECK(out.value() == z1);
  }
  SUBCASE("averaging identical heads returns them unchanged") {
    Matd w(2, 1);
    w << 0.5, 0.5;
    Var<double> out = fusion_combine(t.constant(w), {t.constant(z1), t.constant(z1)});
    CHECK(out.value() == z1);
  }
  SUBCASE("weights act linearly") {
    Matd a(1, 2), b(1, 2), w(2, 1);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    w << 2.0, 3.0;
    Var<double> out = fusion_combine(t.constant(w), {t.constant(a), t.constant(b)});
    Matd expected(1, 2);
    expected << 2.0, 3.0;
    CHECK(out.value() == expected);
  }
}

TEST_CASE("layer with one head and pinned unit weight equals the bare head") {
  const Matd x = small_features();
  const Adjacency adj = path_adjacency();
  const AttentionOptions options;

  AttentionLayerParams<double> layer;
  layer.heads.push_back(small_head(1.0));
  layer.fusion.raw = Matd::Ones(1, 1);
  layer.fusion.raw_is_effective = true;

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  Var<double> via_layer = attention_layer_forward(t.constant(x), adj, bound, layer, options);

  AttentionHeadParams<double> head_params = small_head(1.0);
  BoundHead<double> head = bind_head(bound, head_params);
  Var<double> via_head = attention_head_forward(t.constant(x), adj, head, options);
  CHECK(via_layer.value() == via_head.value());
}

TEST_CASE("two hand-set heads match the oracle extended with the fusion sum") {
  const Matd x = small_features();
  const AttentionOptions options;

  AttentionLayerParams<double> layer;
  layer.heads.push_back(small_head(1.0));
  layer.heads.push_back(small_head(-0.7));
  layer.fusion.raw = Matd(2, 1);
  layer.fusion.raw << 0.6, 1.7;
  layer.fusion.raw_is_effective = true;

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  Var<double> z = attention_layer_forward(t.constant(x), path_adjacency(), bound, layer, options);

  const Matd h1 = test::oracle_attention_head(x, path_neighbor_pairs(), layer.heads[0].weight,
                                              layer.heads[0].attn, options);
  const Matd h2 = test::oracle_attention_head(x, path_neighbor_pairs(), layer.heads[1].weight,
                                              layer.heads[1].attn, options);
  const Matd expected = test::oracle_weighted_combine({h1, h2}, {0.6, 1.7});
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index k = 0; k < 2; ++k)
      CHECK(z.value()(i, k) == doctest::Approx(expected(i, k)).epsilon(1e-12));
  }
}

TEST_CASE("layer output keeps width d for any head count") {
  Rng rng(5);
  const Matd x = small_features();
  for (int heads = 1; heads <= 4; ++heads) {
    AttentionLayerParams<double> layer = init_attention_layer<double>(2, 6, heads, rng);
    Tape<double> t;
    BoundParams<double> bound{&t, {}};
    Var<double> z =
        attention_layer_forward(t.constant(x), path_adjacency(), bound, layer, AttentionOptions{});
    CHECK(z.rows() == 3);
    CHECK(z.cols() == 6);
  }
}

TEST_CASE("attention layer is permutation equivariant, bit for bit") {
  Rng rng(23);
  const Index n = 9;
  Matd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < 3; ++c) x(i, c) = 2.0 * rng.unit() - 1.0;
  IndexVec src, dst;
  for (int e = 0; e < 26; ++e) {
    const Index u = static_cast<Index>(rng.below(n)), v = static_cast<Index>(rng.below(n));
    if (u == v) continue;
    src.push_back(u);
    dst.push_back(v);
  }

  AttentionLayerParams<double> layer = init_attention_layer<double>(3, 4, 2, rng);

  IndexVec perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);  // perm[old] = new

  Matd px(n, 3);
  for (Index i = 0; i < n; ++i) px.row(perm[i]) = x.row(i);
  IndexVec psrc, pdst;
  for (std::size_t e = 0; e < src.size(); ++e) {
    psrc.push_back(perm[src[e]]);
    pdst.push_back(perm[dst[e]]);
  }

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  Var<double> z = attention_layer_forward(t.constant(x), Adjacency::from_edges(src, dst, n, true),
                                          bound, layer, AttentionOptions{});
  Var<double> pz = attention_layer_forward(
      t.constant(px), Adjacency::from_edges(psrc, pdst, n, true), bound, layer,
      AttentionOptions{});

  for (Index i = 0; i < n; ++i) CHECK(z.value().row(i) == pz.value().row(perm[i]));
}

TEST_CASE("layer parameter gradients pass the finite difference check") {
  // The seed keeps some edge logits negative; with all-positive logits the
  // aggregator half of A cancels in the softmax and its exact-zero gradient
  // turns the fd quotient into roundoff noise.
  const Matd x = small_features();
  AttentionLayerParams<double> layer = [] {
    Rng rng(29);
    return init_attention_layer<double>(2, 3, 2, rng);
  }();
  const Adjacency adj = path_adjacency();
  const AttentionOptions options;

  std::vector<Matd*> params;
  for (auto& head : layer.heads) {
    params.push_back(&head.weight);
    params.push_back(&head.attn);
  }
  params.push_back(&layer.fusion.raw);

  auto eval = [&]() {
    Tape<double> t;
    BoundParams<double> bound{&t, {}};
    return ad::sum(attention_layer_forward(t.constant(x), adj, bound, layer, options))
        .value()(0, 0);
  };
  auto grads = [&]() {
    Tape<double> t;
    BoundParams<double> bound{&t, {}};
    Var<double> loss =
        ad::sum(attention_layer_forward(t.constant(x), adj, bound, layer, options));
    t.backward(loss);
    std::vector<Matd> out;
    for (auto& [storage, var] : bound.entries) out.push_back(t.grad_of(var.id()));
    return out;
  };
  CHECK(ad::finite_diff_check<double>(params, eval, grads) < 1e-4);
}

TEST_CASE("factored logits equal the concatenation route") {
  // <A, x_i || x_j> computed as split dot products must match the explicit
  // per-edge concatenation against A.
  Rng rng(41);
  const Index n = 7;
  Matd x(n, 4);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < 4; ++c) x(i, c) = 2.0 * rng.unit() - 1.0;
  const Matd w = glorot_uniform<double>(5, 4, rng);
  const Matd a = glorot_uniform<double>(10, 1, rng);
  IndexVec agg, nbr;
  for (int e = 0; e < 20; ++e) {
    agg.push_back(static_cast<Index>(rng.below(n)));
    nbr.push_back(static_cast<Index>(rng.below(n)));
  }

  Tape<double> t;
  Var<double> transformed = ad::matmul(t.constant(x), ad::transpose(t.constant(w)));
  Var<double> av = t.constant(a);
  Var<double> factored =
      ad::add(ad::gather_rows(ad::matmul(transformed, ad::slice_rows(av, 0, 5)), agg),
              ad::gather_rows(ad::matmul(transformed, ad::slice_rows(av, 5, 5)), nbr));
  Var<double> concatenated = ad::matmul(ad::concat_pairs(transformed, agg, nbr), av);
  for (Eigen::Index e = 0; e < factored.rows(); ++e)
    CHECK(factored.value()(e, 0) ==
          doctest::Approx(concatenated.value()(e, 0)).epsilon(1e-12));
}

TEST_CASE("simplex normalization puts fusion weights on the simplex") {
  const Matd x = small_features();
  AttentionOptions options;
  options.normalize_fusion = true;
  AttentionLayerParams<double> layer = [] {
    Rng rng(59);
    return init_attention_layer<double>(2, 3, 3, rng);
  }();

  Tape<double> t;
  BoundParams<double> bound{&t, {}};
  Var<double> z = attention_layer_forward(t.constant(x), path_adjacency(), bound, layer, options);
  CHECK(z.value().allFinite());

  Tape<double> t2;
  Var<double> beta = ad::simplex_normalize(ad::softplus(t2.parameter(layer.fusion.raw)));
  CHECK(beta.value().sum() == doctest::Approx(1.0).epsilon(1e-12));
}
