#pragma once

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// A Var is a shared handle to a graph node. Ops record their parents and a
// backward closure while gradient recording is enabled on the calling thread;
// under NoGradGuard they produce plain values. Parameters are leaves created
// with Var::parameter and accumulate gradients across backward calls until
// zero_grad().

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "fogforge/nn/matrix.hpp"

namespace fogforge::nn {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {
struct Node {
  Matrix value;
  Matrix grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  void accumulate(const Matrix& g);
};
}  // namespace detail

class Var {
 public:
  Var() = default;

  static Var constant(Matrix value);
  static Var parameter(Matrix value);
  static Var scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const;
  /// Mutable access for optimizers and checkpoint loading. Do not call while
  /// a recorded graph that reads this value is pending backward.
  Matrix& mutable_value();
  /// Gradient, zero-filled to the value's shape when none has accumulated.
  Matrix grad() const;
  bool has_grad() const;
  void zero_grad();
  bool requires_grad() const;

  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double item() const;

  /// Back-propagates from this 1x1 node.
  void backward() const;

  /// Same value, cut from the graph.
  Var detach() const { return constant(value()); }

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Var(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  friend Var make_result(Matrix value, std::vector<Var> parents,
                         std::function<void(detail::Node&)> backward);

  std::shared_ptr<detail::Node> node_;
};

/// Builds a result node. The closure runs during backward with the node whose
/// `grad` holds the upstream gradient.
Var make_result(Matrix value, std::vector<Var> parents, std::function<void(detail::Node&)> backward);

bool grad_enabled();

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Elementwise and linear algebra.
Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
/// Multiplies every entry of `a` by the 1x1 node `s`.
Var scale_by(const Var& a, const Var& s);
/// Adds the 1 x cols row `row` to every row of `a`.
Var add_row(const Var& a, const Var& row);
Var square(const Var& a);
Var exp(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
Var minimum(const Var& a, const Var& b);
/// Gradient passes only where lo < a < hi.
Var clamp(const Var& a, double lo, double hi);

// Reductions and reshaping.
Var sum(const Var& a);
Var mean(const Var& a);
/// Column means, 1 x cols.
Var mean_rows(const Var& a);
Var hcat(std::span<const Var> parts);
Var vcat(std::span<const Var> parts);
/// Stacks a 1 x cols row n times.
Var repeat_rows(const Var& row, Eigen::Index n);
Var select_row(const Var& a, Eigen::Index r);
/// Column vector -> 1 x 1 entry.
Var pick(const Var& a, Eigen::Index r, Eigen::Index c = 0);
/// r x c -> (r*c) x 1, row-major order.
Var flatten_col(const Var& a);

/// Log-softmax over a column vector; masked-out entries (mask == 0) get
/// -infinity and receive zero gradient. At least one entry must be allowed.
Var masked_log_softmax(const Var& logits, std::span<const std::uint8_t> mask);
/// Entropy of the distribution given by a masked log-softmax column.
Var categorical_entropy(const Var& log_probs);

/// Batch normalization with batch statistics over rows (training mode).
/// Returns normalized*gamma + beta; `batch_mean`/`batch_var` receive the
/// (biased) statistics when non-null.
Var batch_norm(const Var& x, const Var& gamma, const Var& beta, double eps,
               Matrix* batch_mean = nullptr, Matrix* batch_var = nullptr);

}  // namespace fogforge::nn
