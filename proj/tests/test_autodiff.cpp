#include <doctest.h>

#include <cmath>

#include "gramme/ad/adam.hpp"
#include "gramme/ad/gradcheck.hpp"
#include "gramme/ad/ops.hpp"
#include "gramme/gradcheck_suite.hpp"

using namespace gramme;
using ad::Tape;
using ad::Var;

namespace {

Matd from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matd m(static_cast<Eigen::Index>(rows.size()),
         static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST_CASE("matmul with the identity is the identity map") {
  Tape<double> t;
  const Matd x = from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  Var<double> out = ad::matmul(t.constant(Matd::Identity(3, 3)), t.constant(x));
  CHECK(out.value() == x);
}

TEST_CASE("concat_pairs gathers endpoint features side by side") {
  Tape<double> t;
  Var<double> x = t.constant(from_rows({{1.0, 2.0}, {3.0, 4.0}}));
  const IndexVec first{0}, second{1};
  Var<double> out = ad::concat_pairs(x, first, second);
  CHECK(out.value() == from_rows({{1.0, 2.0, 3.0, 4.0}}));
}

TEST_CASE("segment_sum adds rows within segments") {
  Tape<double> t;
  Var<double> x = t.constant(from_rows({{1.0}, {2.0}, {3.0}}));
  const IndexVec seg{0, 0, 1};
  Var<double> out = ad::segment_sum(x, seg, 2);
  CHECK(out.value() == from_rows({{3.0}, {3.0}}));
}

TEST_CASE("segment_softmax on flat, singleton and analytic segments") {
  Tape<double> t;
  Var<double> x =
      t.constant(from_rows({{0.0}, {0.0}, {0.0}, {42.0}, {std::log(2.0)}, {0.0}}));
  const IndexVec seg{0, 0, 0, 1, 2, 2};
  Var<double> out = ad::segment_softmax(x, seg, 3);
  CHECK(out.value()(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(out.value()(1, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(out.value()(2, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(out.value()(3, 0) == 1.0);
  CHECK(out.value()(4, 0) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(out.value()(5, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("segment_softmax normalizes and is shift invariant") {
  Rng rng(3);
  IndexVec seg;
  Matd logits(40, 1), shifted(40, 1);
  std::vector<double> shift_of = {0.0, 10.0, -3.0, 0.5};
  for (int e = 0; e < 40; ++e) {
    seg.push_back(static_cast<Index>(rng.below(4)));
    logits(e, 0) = 4.0 * rng.unit() - 2.0;
    shifted(e, 0) = logits(e, 0) + shift_of[static_cast<std::size_t>(seg.back())];
  }
  Tape<double> t;
  Var<double> a = ad::segment_softmax(t.constant(logits), seg, 4);
  Var<double> b = ad::segment_softmax(t.constant(shifted), seg, 4);

  std::vector<double> totals(4, 0.0);
  for (int e = 0; e < 40; ++e) {
    CHECK(a.value()(e, 0) > 0.0);
    totals[static_cast<std::size_t>(seg[e])] += a.value()(e, 0);
    CHECK(a.value()(e, 0) == doctest::Approx(b.value()(e, 0)).epsilon(1e-12));
  }
  for (double s : totals) CHECK(std::abs(s - 1.0) < 1e-10);
}

TEST_CASE("segment_softmax rejects empty segments") {
  Tape<double> t;
  Var<double> x = t.constant(from_rows({{1.0}}));
  const IndexVec seg{0};
  CHECK_THROWS_AS(ad::segment_softmax(x, seg, 2), NumericError);
}

TEST_CASE("masked cross entropy matches hand computations") {
  Tape<double> t;
  SUBCASE("uniform logits over 7 classes") {
    Var<double> logits = t.constant(Matd::Zero(3, 7));
    const std::vector<int> labels{0, 3, 6};
    const IndexVec mask{0, 1, 2};
    Var<double> loss = ad::masked_cross_entropy(logits, labels, mask);
    CHECK(loss.value()(0, 0) == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  }
  SUBCASE("large margin drives the loss to zero") {
    Matd logits = Matd::Zero(1, 4);
    logits(0, 2) = 50.0;
    const std::vector<int> labels{-1, -1, -1};
    const std::vector<int> labels_ok{2};
    const IndexVec mask{0};
    Var<double> loss = ad::masked_cross_entropy(t.constant(logits), labels_ok, mask);
    CHECK(loss.value()(0, 0) < 1e-8);
  }
  SUBCASE("two nodes, two classes") {
    Var<double> logits = t.constant(from_rows({{1.0, 0.0}, {0.0, 1.0}}));
    const std::vector<int> labels{0, 1};
    const IndexVec mask{0, 1};
    Var<double> loss = ad::masked_cross_entropy(logits, labels, mask);
    CHECK(loss.value()(0, 0) == doctest::Approx(std::log1p(std::exp(-1.0))).epsilon(1e-12));
  }
  SUBCASE("empty mask is rejected") {
    Var<double> logits = t.constant(Matd::Zero(2, 2));
    const std::vector<int> labels{0, 1};
    const IndexVec mask{};
    CHECK_THROWS_AS(ad::masked_cross_entropy(logits, labels, mask), DataError);
  }
}

TEST_CASE("backward of sum(W x) broadcasts x") {
  Tape<double> t;
  const Matd x = from_rows({{2.0}, {3.0}, {5.0}});
  Var<double> w = t.parameter(Matd::Ones(4, 3));
  Var<double> loss = ad::sum(ad::matmul(w, t.constant(x)));
  t.backward(loss);
  for (Eigen::Index r = 0; r < 4; ++r) CHECK(w.grad().row(r).transpose() == x);
}

TEST_CASE("unused parameters get zero gradients") {
  Tape<double> t;
  Var<double> used = t.parameter(Matd::Ones(2, 2));
  Var<double> unused = t.parameter(Matd::Ones(2, 2));
  t.backward(ad::sum(used));
  CHECK(t.grad_of(unused.id()) == Matd::Zero(2, 2));
}

TEST_CASE("backward without reset accumulates gradients") {
  Tape<double> t;
  Var<double> w = t.parameter(from_rows({{1.0, 2.0}}));
  Var<double> loss = ad::sum(ad::scale(w, 3.0));
  t.backward(loss);
  CHECK(w.grad() == from_rows({{3.0, 3.0}}));
  t.backward(loss);
  CHECK(w.grad() == from_rows({{6.0, 6.0}}));
  t.zero_grad();
  t.backward(loss);
  CHECK(w.grad() == from_rows({{3.0, 3.0}}));
}

TEST_CASE("backward visits each reachable node exactly once") {
  Tape<double> t;
  Var<double> a = t.parameter(Matd::Ones(2, 2));
  Var<double> b = ad::scale(a, 2.0);
  Var<double> c = ad::add(b, b);  // diamond: b feeds c twice
  Var<double> d = ad::add(c, a);
  Var<double> loss = ad::sum(d);
  Var<double> orphan = ad::scale(a, 5.0);  // not reachable from the loss
  (void)orphan;
  t.backward(loss);
  CHECK(t.last_backward_visits() == 5);  // a, b, c, d, loss
  CHECK(a.grad() == Matd::Constant(2, 2, 5.0));  // d = 2*(2a) + a
}

TEST_CASE("backward requires a scalar loss") {
  Tape<double> t;
  Var<double> a = t.parameter(Matd::Ones(2, 2));
  CHECK_THROWS_AS(t.backward(a), ShapeError);
}

TEST_CASE("shape mismatches name the op") {
  Tape<double> t;
  Var<double> a = t.constant(Matd::Ones(2, 3));
  Var<double> b = t.constant(Matd::Ones(2, 3));
  CHECK_THROWS_WITH_AS(ad::matmul(a, b), doctest::Contains("matmul"), ShapeError);
  CHECK_THROWS_WITH_AS(ad::add(a, t.constant(Matd::Ones(3, 2))), doctest::Contains("add"),
                       ShapeError);
  const IndexVec bad{7};
  CHECK_THROWS_WITH_AS(ad::gather_rows(a, bad), doctest::Contains("gather_rows"), ShapeError);
}

TEST_CASE("non-finite op outputs are rejected") {
  Tape<double> t;
  Var<double> big = t.constant(Matd::Constant(2, 2, 1e308));
  CHECK_THROWS_AS(ad::matmul(big, big), NumericError);
  Matd nan_mat = Matd::Zero(1, 1);
  nan_mat(0, 0) = std::nan("");
  CHECK_THROWS_AS(t.parameter(nan_mat), NumericError);
}

TEST_CASE("finite differences are exact for quadratics") {
  Matd w = from_rows({{0.7, -1.2}, {0.3, 2.0}});
  std::vector<Matd*> params{&w};
  auto eval = [&]() { return (w.array() * w.array()).sum(); };
  auto grads = [&]() { return std::vector<Matd>{2.0 * w}; };
  CHECK(ad::finite_diff_check<double>(params, eval, grads) < 1e-9);
}

TEST_CASE("every op passes the randomized gradient check") {
  // 100 randomized-shape trials per op.
  for (const GradCheckEntry& e : gradcheck_ops(100, 2024)) {
    CAPTURE(e.name);
    CHECK(e.max_rel_error < 1e-4);
  }
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
  Matd w = from_rows({{1.0, -2.0}});
  const Matd before = w;
  Matd g = Matd::Zero(1, 2);
  std::vector<Matd*> params{&w};
  std::vector<const Matd*> grads{&g};
  ad::AdamState<double> state;
  ad::adam_step(params, grads, state, ad::AdamConfig<double>{});
  CHECK(w == before);
}

TEST_CASE("first adam step moves each coordinate by about lr") {
  Matd w = from_rows({{1.0, -1.0, 0.5}});
  Matd g = from_rows({{0.3, -2.0, 17.0}});
  std::vector<Matd*> params{&w};
  std::vector<const Matd*> grads{&g};
  ad::AdamState<double> state;
  ad::AdamConfig<double> config;
  config.lr = 0.01;
  ad::adam_step(params, grads, state, config);
  CHECK(std::abs(w(0, 0) - (1.0 - 0.01)) < 1e-8);
  CHECK(std::abs(w(0, 1) - (-1.0 + 0.01)) < 1e-8);
  CHECK(std::abs(w(0, 2) - (0.5 - 0.01)) < 1e-8);
}

TEST_CASE("two adam steps match an independently scripted trace") {
  // Oracle: plain scalar Adam on f(w) = w^2, written out by hand.
  double w_ref = 1.0, m = 0.0, v = 0.0;
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int step = 1; step <= 2; ++step) {
    const double g = 2.0 * w_ref;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, step));
    const double vh = v / (1 - std::pow(b2, step));
    w_ref -= lr * mh / (std::sqrt(vh) + eps);
  }

  Matd w = from_rows({{1.0}});
  std::vector<Matd*> params{&w};
  ad::AdamState<double> state;
  ad::AdamConfig<double> config;
  config.lr = 0.1;
  for (int step = 0; step < 2; ++step) {
    Matd g = 2.0 * w;
    std::vector<const Matd*> grads{&g};
    ad::adam_step(params, grads, state, config);
  }
  CHECK(std::abs(w(0, 0) - w_ref) < 1e-12);
}

TEST_CASE("adam rejects non-finite gradients") {
  Matd w = from_rows({{1.0}});
  Matd g = from_rows({{std::numeric_limits<double>::infinity()}});
  std::vector<Matd*> params{&w};
  std::vector<const Matd*> grads{&g};
  ad::AdamState<double> state;
  CHECK_THROWS_AS(ad::adam_step(params, grads, state, ad::AdamConfig<double>{}), NumericError);
}

TEST_CASE("engine instantiates at single precision") {
  Tape<float> t;
  Var<float> w = t.parameter(Mat<float>::Ones(2, 2));
  Var<float> loss = ad::sum(ad::elu(ad::scale(w, 0.5f)));
  t.backward(loss);
  CHECK(w.grad().allFinite());
}
