#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gramme/ad/tape.hpp"

// Differentiable ops over tape vars. Index spans passed to gather/scatter
// ops are captured by reference semantics: the caller keeps the underlying
// arrays alive for the lifetime of the tape.

namespace gramme::ad {

namespace detail {

inline void check_indices(const char* op, std::span<const Index> idx, Eigen::Index bound) {
  for (const Index i : idx) {
    if (i < 0 || static_cast<Eigen::Index>(i) >= bound)
      throw ShapeError(std::string(op) + ": index " + std::to_string(i) + " outside [0, " +
                       std::to_string(bound) + ")");
  }
}

template <typename Scalar>
[[noreturn]] void shape_fail(const char* op, const Var<Scalar>& a, const Var<Scalar>& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.tape().shape_str(a.id()) +
                   " and " + b.tape().shape_str(b.id()));
}

}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(Var<Scalar> a, Var<Scalar> b) {
  if (a.cols() != b.rows()) detail::shape_fail("matmul", a, b);
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value() * b.value();
  const int a_id = a.id(), b_id = b.id();
  const int out = static_cast<int>(t.size());
  return t.record("matmul", std::move(value), {a_id, b_id}, [&t, a_id, b_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id).noalias() += g * t.node(b_id).value.transpose();
    t.grad_of(b_id).noalias() += t.node(a_id).value.transpose() * g;
  });
}

template <typename Scalar>
Var<Scalar> transpose(Var<Scalar> a) {
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value().transpose();
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("transpose", std::move(value), {a_id}, [&t, a_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id).noalias() += g.transpose();
  });
}

template <typename Scalar>
Var<Scalar> add(Var<Scalar> a, Var<Scalar> b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) detail::shape_fail("add", a, b);
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value() + b.value();
  const int a_id = a.id(), b_id = b.id();
  const int out = static_cast<int>(t.size());
  return t.record("add", std::move(value), {a_id, b_id}, [&t, a_id, b_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id) += g;
    t.grad_of(b_id) += g;
  });
}

template <typename Scalar>
Var<Scalar> sub(Var<Scalar> a, Var<Scalar> b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) detail::shape_fail("sub", a, b);
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value() - b.value();
  const int a_id = a.id(), b_id = b.id();
  const int out = static_cast<int>(t.size());
  return t.record("sub", std::move(value), {a_id, b_id}, [&t, a_id, b_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id) += g;
    t.grad_of(b_id) -= g;
  });
}

template <typename Scalar>
Var<Scalar> scale(Var<Scalar> a, Scalar c) {
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value() * c;
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("scale", std::move(value), {a_id}, [&t, a_id, c, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id) += g * c;
  });
}

/// Division rather than multiplication by a reciprocal, so means over c
/// identical values reproduce the value when the quotient is representable.
template <typename Scalar>
Var<Scalar> div_scalar(Var<Scalar> a, Scalar c) {
  if (c == Scalar(0)) throw NumericError("div_scalar: division by zero");
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value() / c;
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("div_scalar", std::move(value), {a_id}, [&t, a_id, c, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id) += g / c;
  });
}

/// Adds a 1xC row vector to every row of a.
template <typename Scalar>
Var<Scalar> add_row_broadcast(Var<Scalar> a, Var<Scalar> row) {
  if (row.rows() != 1 || row.cols() != a.cols()) detail::shape_fail("add_row_broadcast", a, row);
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value();
  value.rowwise() += row.value().row(0);
  const int a_id = a.id(), r_id = row.id();
  const int out = static_cast<int>(t.size());
  return t.record("add_row_broadcast", std::move(value), {a_id, r_id}, [&t, a_id, r_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id) += g;
    t.grad_of(r_id).row(0) += g.colwise().sum();
  });
}

template <typename Scalar>
Var<Scalar> sum(Var<Scalar> a) {
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value(1, 1);
  value(0, 0) = a.value().sum();
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("sum", std::move(value), {a_id}, [&t, a_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id).array() += g(0, 0);
  });
}

template <typename Scalar>
Var<Scalar> slice_rows(Var<Scalar> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows())
    throw ShapeError("slice_rows: rows [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") outside " + a.tape().shape_str(a.id()));
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value().middleRows(start, count);
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("slice_rows", std::move(value), {a_id}, [&t, a_id, start, count, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    t.grad_of(a_id).middleRows(start, count) += g;
  });
}

template <typename Scalar>
Var<Scalar> gather_rows(Var<Scalar> a, std::span<const Index> idx) {
  detail::check_indices("gather_rows", idx, a.rows());
  Tape<Scalar>& t = a.tape();
  const Eigen::Index cols = a.cols();
  Mat<Scalar> value(static_cast<Eigen::Index>(idx.size()), cols);
  {
    const Scalar* src = a.value().data();
    Scalar* dst = value.data();
    for (std::size_t e = 0; e < idx.size(); ++e, dst += cols)
      std::copy_n(src + static_cast<Eigen::Index>(idx[e]) * cols, cols, dst);
  }
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("gather_rows", std::move(value), {a_id}, [&t, a_id, idx, cols, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    Scalar* da = t.grad_of(a_id).data();
    const Scalar* gp = g.data();
    for (std::size_t e = 0; e < idx.size(); ++e, gp += cols) {
      Scalar* row = da + static_cast<Eigen::Index>(idx[e]) * cols;
      for (Eigen::Index c = 0; c < cols; ++c) row[c] += gp[c];
    }
  });
}

/// Edge-indexed gather of [a.row(first[e]) || a.row(second[e])].
template <typename Scalar>
Var<Scalar> concat_pairs(Var<Scalar> a, std::span<const Index> first,
                         std::span<const Index> second) {
  if (first.size() != second.size())
    throw ShapeError("concat_pairs: index lists differ in length");
  detail::check_indices("concat_pairs", first, a.rows());
  detail::check_indices("concat_pairs", second, a.rows());
  Tape<Scalar>& t = a.tape();
  const Eigen::Index d = a.cols();
  Mat<Scalar> value(static_cast<Eigen::Index>(first.size()), 2 * d);
  for (std::size_t e = 0; e < first.size(); ++e) {
    const auto r = static_cast<Eigen::Index>(e);
    value.row(r).head(d) = a.value().row(first[e]);
    value.row(r).tail(d) = a.value().row(second[e]);
  }
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("concat_pairs", std::move(value), {a_id}, [&t, a_id, first, second, d, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    Mat<Scalar>& da = t.grad_of(a_id);
    for (std::size_t e = 0; e < first.size(); ++e) {
      const auto r = static_cast<Eigen::Index>(e);
      da.row(first[e]) += g.row(r).head(d);
      da.row(second[e]) += g.row(r).tail(d);
    }
  });
}

template <typename Scalar>
Var<Scalar> leaky_relu(Var<Scalar> a, Scalar slope) {
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value().unaryExpr(
      [slope](Scalar x) { return x > Scalar(0) ? x : slope * x; });
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("leaky_relu", std::move(value), {a_id}, [&t, a_id, slope, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    const Scalar* x = t.node(a_id).value.data();
    const Scalar* gp = g.data();
    Scalar* dx = t.grad_of(a_id).data();
    const Eigen::Index n = g.size();
    for (Eigen::Index i = 0; i < n; ++i) dx[i] += x[i] > Scalar(0) ? gp[i] : slope * gp[i];
  });
}

template <typename Scalar>
Var<Scalar> elu(Var<Scalar> a) {
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value().unaryExpr(
      [](Scalar x) { return x > Scalar(0) ? x : std::expm1(x); });
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("elu", std::move(value), {a_id}, [&t, a_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    const Scalar* x = t.node(a_id).value.data();
    const Scalar* y = t.node(out).value.data();
    const Scalar* gp = g.data();
    Scalar* dx = t.grad_of(a_id).data();
    const Eigen::Index n = g.size();
    // dy/dx = 1 for x > 0, exp(x) = y + 1 otherwise.
    for (Eigen::Index i = 0; i < n; ++i)
      dx[i] += x[i] > Scalar(0) ? gp[i] : gp[i] * (y[i] + Scalar(1));
  });
}

template <typename Scalar>
Var<Scalar> softplus(Var<Scalar> a) {
  Tape<Scalar>& t = a.tape();
  Mat<Scalar> value = a.value().unaryExpr([](Scalar x) {
    return x > Scalar(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  });
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("softplus", std::move(value), {a_id}, [&t, a_id, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    const auto sigmoid = t.node(a_id).value.unaryExpr([](Scalar x) {
      const Scalar e = std::exp(-std::abs(x));
      return x >= Scalar(0) ? Scalar(1) / (Scalar(1) + e) : e / (Scalar(1) + e);
    });
    t.grad_of(a_id).array() += g.array() * sigmoid.array();
  });
}

/// v / sum(v), for optional simplex-normalized fusion weights.
template <typename Scalar>
Var<Scalar> simplex_normalize(Var<Scalar> v) {
  if (v.cols() != 1) throw ShapeError("simplex_normalize: expected a column vector");
  Tape<Scalar>& t = v.tape();
  const Scalar s = v.value().sum();
  if (s == Scalar(0)) throw NumericError("simplex_normalize: weights sum to zero");
  Mat<Scalar> value = v.value() / s;
  const int v_id = v.id();
  const int out = static_cast<int>(t.size());
  return t.record("simplex_normalize", std::move(value), {v_id}, [&t, v_id, s, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    const auto& y = t.node(out).value;
    const Scalar dot = (g.array() * y.array()).sum();
    t.grad_of(v_id).array() += (g.array() - dot) / s;
  });
}

/// Sums rows of a into their segment: out.row(seg[e]) += a.row(e).
template <typename Scalar>
Var<Scalar> segment_sum(Var<Scalar> a, std::span<const Index> seg, Index n_segments) {
  if (static_cast<std::size_t>(a.rows()) != seg.size())
    throw ShapeError("segment_sum: " + std::to_string(seg.size()) + " segment ids for " +
                     a.tape().shape_str(a.id()));
  detail::check_indices("segment_sum", seg, n_segments);
  Tape<Scalar>& t = a.tape();
  const Eigen::Index cols = a.cols();
  Mat<Scalar> value = Mat<Scalar>::Zero(n_segments, cols);
  {
    const Scalar* src = a.value().data();
    Scalar* dst = value.data();
    for (std::size_t e = 0; e < seg.size(); ++e, src += cols) {
      Scalar* row = dst + static_cast<Eigen::Index>(seg[e]) * cols;
      for (Eigen::Index c = 0; c < cols; ++c) row[c] += src[c];
    }
  }
  const int a_id = a.id();
  const int out = static_cast<int>(t.size());
  return t.record("segment_sum", std::move(value), {a_id}, [&t, a_id, seg, cols, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    Scalar* da = t.grad_of(a_id).data();
    const Scalar* gp = g.data();
    for (std::size_t e = 0; e < seg.size(); ++e, da += cols) {
      const Scalar* row = gp + static_cast<Eigen::Index>(seg[e]) * cols;
      for (Eigen::Index c = 0; c < cols; ++c) da[c] += row[c];
    }
  });
}

/// Softmax of per-edge logits within each destination segment, stabilized
/// by per-segment max subtraction. Every segment in [0, n_segments) must
/// own at least one edge.
template <typename Scalar>
Var<Scalar> segment_softmax(Var<Scalar> logits, std::span<const Index> seg, Index n_segments) {
  if (logits.cols() != 1) throw ShapeError("segment_softmax: logits must be a column vector");
  if (static_cast<std::size_t>(logits.rows()) != seg.size())
    throw ShapeError("segment_softmax: " + std::to_string(seg.size()) + " segment ids for " +
                     logits.tape().shape_str(logits.id()));
  detail::check_indices("segment_softmax", seg, n_segments);
  Tape<Scalar>& t = logits.tape();

  std::vector<Scalar> seg_max(static_cast<std::size_t>(n_segments),
                              -std::numeric_limits<Scalar>::infinity());
  const auto& x = logits.value();
  for (std::size_t e = 0; e < seg.size(); ++e) {
    Scalar& m = seg_max[static_cast<std::size_t>(seg[e])];
    m = std::max(m, x(static_cast<Eigen::Index>(e), 0));
  }
  for (Index s = 0; s < n_segments; ++s) {
    if (seg_max[static_cast<std::size_t>(s)] == -std::numeric_limits<Scalar>::infinity())
      throw NumericError("segment_softmax: segment " + std::to_string(s) +
                         " has no edges (self-edge construction failed)");
  }

  Mat<Scalar> value(x.rows(), 1);
  std::vector<Scalar> seg_sum(static_cast<std::size_t>(n_segments), Scalar(0));
  for (std::size_t e = 0; e < seg.size(); ++e) {
    const Scalar v = std::exp(x(static_cast<Eigen::Index>(e), 0) -
                              seg_max[static_cast<std::size_t>(seg[e])]);
    value(static_cast<Eigen::Index>(e), 0) = v;
    seg_sum[static_cast<std::size_t>(seg[e])] += v;
  }
  for (std::size_t e = 0; e < seg.size(); ++e)
    value(static_cast<Eigen::Index>(e), 0) /= seg_sum[static_cast<std::size_t>(seg[e])];

  const int x_id = logits.id();
  const int out = static_cast<int>(t.size());
  return t.record("segment_softmax", std::move(value), {x_id}, [&t, x_id, seg, n_segments, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    const Mat<Scalar>& alpha = t.node(out).value;
    std::vector<Scalar> seg_dot(static_cast<std::size_t>(n_segments), Scalar(0));
    for (std::size_t e = 0; e < seg.size(); ++e) {
      const auto r = static_cast<Eigen::Index>(e);
      seg_dot[static_cast<std::size_t>(seg[e])] += g(r, 0) * alpha(r, 0);
    }
    Mat<Scalar>& dx = t.grad_of(x_id);
    for (std::size_t e = 0; e < seg.size(); ++e) {
      const auto r = static_cast<Eigen::Index>(e);
      dx(r, 0) += alpha(r, 0) * (g(r, 0) - seg_dot[static_cast<std::size_t>(seg[e])]);
    }
  });
}

/// Per-segment weighted combination of gathered rows:
///   out.row(seg[e]) += coeff[e] * rows.row(row_idx[e]).
template <typename Scalar>
Var<Scalar> segment_weighted_sum(Var<Scalar> coeff, Var<Scalar> rows,
                                 std::span<const Index> row_idx, std::span<const Index> seg,
                                 Index n_segments) {
  if (coeff.cols() != 1) throw ShapeError("segment_weighted_sum: coeff must be a column vector");
  if (static_cast<std::size_t>(coeff.rows()) != row_idx.size() || row_idx.size() != seg.size())
    throw ShapeError("segment_weighted_sum: edge arrays disagree in length");
  detail::check_indices("segment_weighted_sum", row_idx, rows.rows());
  detail::check_indices("segment_weighted_sum", seg, n_segments);
  Tape<Scalar>& t = coeff.tape();

  const Eigen::Index cols = rows.cols();
  Mat<Scalar> value = Mat<Scalar>::Zero(n_segments, cols);
  {
    const Scalar* cp = coeff.value().data();
    const Scalar* rp = rows.value().data();
    Scalar* dst = value.data();
    for (std::size_t e = 0; e < seg.size(); ++e) {
      const Scalar w = cp[e];
      const Scalar* src = rp + static_cast<Eigen::Index>(row_idx[e]) * cols;
      Scalar* row = dst + static_cast<Eigen::Index>(seg[e]) * cols;
      for (Eigen::Index c = 0; c < cols; ++c) row[c] += w * src[c];
    }
  }
  const int c_id = coeff.id(), r_id = rows.id();
  const int out = static_cast<int>(t.size());
  return t.record("segment_weighted_sum", std::move(value), {c_id, r_id},
                  [&t, c_id, r_id, row_idx, seg, cols, out] {
                    const Mat<Scalar>& g = t.node(out).grad;
                    if (g.size() == 0) return;
                    const Scalar* cp = t.node(c_id).value.data();
                    const Scalar* rp = t.node(r_id).value.data();
                    const Scalar* gp = g.data();
                    Scalar* dc = t.grad_of(c_id).data();
                    Scalar* dr = t.grad_of(r_id).data();
                    for (std::size_t e = 0; e < seg.size(); ++e) {
                      const Scalar* grow = gp + static_cast<Eigen::Index>(seg[e]) * cols;
                      const Scalar* rrow = rp + static_cast<Eigen::Index>(row_idx[e]) * cols;
                      Scalar* drow = dr + static_cast<Eigen::Index>(row_idx[e]) * cols;
                      const Scalar w = cp[e];
                      Scalar dot = Scalar(0);
                      for (Eigen::Index c = 0; c < cols; ++c) {
                        dot += grow[c] * rrow[c];
                        drow[c] += w * grow[c];
                      }
                      dc[e] += dot;
                    }
                  });
}

/// Linear combination of same-shaped parts with a trainable weight vector.
template <typename Scalar>
Var<Scalar> weighted_sum(Var<Scalar> weights, const std::vector<Var<Scalar>>& parts) {
  if (parts.empty()) throw ShapeError("weighted_sum: no parts");
  if (weights.cols() != 1 || static_cast<std::size_t>(weights.rows()) != parts.size())
    throw ShapeError("weighted_sum: expected " + std::to_string(parts.size()) +
                     " weights, got " + weights.tape().shape_str(weights.id()));
  Tape<Scalar>& t = weights.tape();
  std::vector<int> parents{weights.id()};
  for (const auto& p : parts) {
    if (p.rows() != parts[0].rows() || p.cols() != parts[0].cols())
      detail::shape_fail("weighted_sum", parts[0], p);
    parents.push_back(p.id());
  }
  Mat<Scalar> value = weights.value()(0, 0) * parts[0].value();
  for (std::size_t h = 1; h < parts.size(); ++h)
    value.noalias() += weights.value()(static_cast<Eigen::Index>(h), 0) * parts[h].value();

  const int w_id = weights.id();
  std::vector<int> part_ids;
  for (const auto& p : parts) part_ids.push_back(p.id());
  const int out = static_cast<int>(t.size());
  return t.record("weighted_sum", std::move(value), std::move(parents),
                  [&t, w_id, part_ids = std::move(part_ids), out] {
                    const Mat<Scalar>& g = t.node(out).grad;
                    if (g.size() == 0) return;
                    const Mat<Scalar>& w = t.node(w_id).value;
                    Mat<Scalar>& dw = t.grad_of(w_id);
                    for (std::size_t h = 0; h < part_ids.size(); ++h) {
                      const auto r = static_cast<Eigen::Index>(h);
                      const Mat<Scalar>& p = t.node(part_ids[h]).value;
                      dw(r, 0) += (g.array() * p.array()).sum();
                      t.grad_of(part_ids[h]).noalias() += w(r, 0) * g;
                    }
                  });
}

/// Mean over masked rows of -log softmax(logits)[label].
template <typename Scalar>
Var<Scalar> masked_cross_entropy(Var<Scalar> logits, std::span<const int> labels,
                                 std::span<const Index> mask) {
  if (mask.empty()) throw DataError("masked_cross_entropy: empty mask");
  detail::check_indices("masked_cross_entropy", mask, logits.rows());
  const Eigen::Index n_classes = logits.cols();
  for (const Index v : mask) {
    const int lbl = labels[static_cast<std::size_t>(v)];
    if (lbl < 0 || lbl >= n_classes)
      throw DataError("masked_cross_entropy: node " + std::to_string(v) +
                      " has no label in [0, " + std::to_string(n_classes) + ")");
  }
  Tape<Scalar>& t = logits.tape();

  const auto& x = logits.value();
  Scalar total = Scalar(0);
  for (const Index v : mask) {
    const auto row = x.row(v);
    const Scalar m = row.maxCoeff();
    const Scalar lse = m + std::log((row.array() - m).exp().sum());
    total += lse - row(labels[static_cast<std::size_t>(v)]);
  }
  Mat<Scalar> value(1, 1);
  value(0, 0) = total / static_cast<Scalar>(mask.size());

  const int x_id = logits.id();
  const int out = static_cast<int>(t.size());
  return t.record("masked_cross_entropy", std::move(value), {x_id}, [&t, x_id, labels, mask, out] {
    const Mat<Scalar>& g = t.node(out).grad;
    if (g.size() == 0) return;
    const Scalar scale = g(0, 0) / static_cast<Scalar>(mask.size());
    const Mat<Scalar>& x = t.node(x_id).value;
    Mat<Scalar>& dx = t.grad_of(x_id);
    for (const Index v : mask) {
      const auto row = x.row(v);
      const Scalar m = row.maxCoeff();
      Eigen::Array<Scalar, 1, Eigen::Dynamic> sm = (row.array() - m).exp();
      sm /= sm.sum();
      dx.row(v) += scale * sm.matrix();
      dx(v, labels[static_cast<std::size_t>(v)]) -= scale;
    }
  });
}

}  // namespace gramme::ad
