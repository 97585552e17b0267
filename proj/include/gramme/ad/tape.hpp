#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gramme/types.hpp"

namespace gramme::ad {

template <typename Scalar>
class Tape;

/// Handle to one tape entry. Cheap to copy; the tape must outlive it.
template <typename Scalar>
class Var {
 public:
  Var() = default;

  const Mat<Scalar>& value() const { return tape_->node(id_).value; }
  const Mat<Scalar>& grad() const { return tape_->node(id_).grad; }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }
  Tape<Scalar>& tape() const { return *tape_; }
  int id() const { return id_; }

 private:
  friend class Tape<Scalar>;
  Var(Tape<Scalar>* tape, int id) : tape_(tape), id_(id) {}
  Tape<Scalar>* tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode tape over dense matrices. Creation order is a topological
/// order, so backward is a single reverse sweep that visits each reachable
/// node exactly once. Gradients accumulate across backward calls until
/// zero_grad() or reset().
template <typename Scalar>
class Tape {
 public:
  struct Node {
    Mat<Scalar> value;
    Mat<Scalar> grad;  // allocated lazily during backward
    std::vector<int> parents;
    std::function<void()> backward;
    const char* op = "leaf";
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// When set, every op output is checked for NaN/Inf as it is recorded.
  bool check_values = true;

  Var<Scalar> constant(Mat<Scalar> value) { return record("constant", std::move(value), {}, {}); }

  Var<Scalar> parameter(Mat<Scalar> value) {
    if (check_values && !value.allFinite())
      throw NumericError("parameter: non-finite entries");
    return record("parameter", std::move(value), {}, {});
  }

  Var<Scalar> record(const char* op, Mat<Scalar> value, std::vector<int> parents,
                     std::function<void()> backward) {
    if (check_values && !value.allFinite())
      throw NumericError(std::string(op) + ": produced non-finite values");
    Node n;
    n.value = std::move(value);
    n.parents = std::move(parents);
    n.backward = std::move(backward);
    n.op = op;
    nodes_.push_back(std::move(n));
    return Var<Scalar>(this, static_cast<int>(nodes_.size()) - 1);
  }

  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  Mat<Scalar>& grad_of(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) n.grad = Mat<Scalar>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  /// Seeds d(loss)/d(loss) = 1 and propagates to every reachable node.
  /// Interior adjoints are recomputed per call; leaf (parameter/constant)
  /// gradients accumulate until zero_grad().
  void backward(const Var<Scalar>& loss) {
    if (loss.value().rows() != 1 || loss.value().cols() != 1)
      throw ShapeError("backward: loss must be a 1x1 scalar, got " + shape_str(loss.id()));

    // Mark the subgraph below the loss.
    std::vector<bool> needed(nodes_.size(), false);
    std::vector<int> stack{loss.id()};
    needed[static_cast<std::size_t>(loss.id())] = true;
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      for (int p : nodes_[static_cast<std::size_t>(id)].parents) {
        if (!needed[static_cast<std::size_t>(p)]) {
          needed[static_cast<std::size_t>(p)] = true;
          stack.push_back(p);
        }
      }
    }

    for (Node& n : nodes_) {
      if (n.backward && n.grad.size() != 0) n.grad.setZero();
    }

    grad_of(loss.id())(0, 0) += Scalar(1);
    last_backward_visits_ = 0;
    for (int id = loss.id(); id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (!needed[static_cast<std::size_t>(id)]) continue;
      ++last_backward_visits_;
      if (n.backward) n.backward();
    }
  }

  void zero_grad() {
    for (Node& n : nodes_) {
      if (n.grad.size() != 0) n.grad.setZero();
    }
  }

  /// Number of nodes visited by the most recent backward sweep.
  std::size_t last_backward_visits() const { return last_backward_visits_; }

  std::string shape_str(int id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    return std::to_string(n.value.rows()) + "x" + std::to_string(n.value.cols());
  }

 private:
  std::vector<Node> nodes_;
  std::size_t last_backward_visits_ = 0;
};

}  // namespace gramme::ad
