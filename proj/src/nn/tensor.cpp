#include "fogforge/nn/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>

namespace fogforge::nn {

namespace {
thread_local bool g_grad_enabled = true;

std::string shape(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

void same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape(a.value()) + " vs " + shape(b.value()));
}

const Matrix& pv(detail::Node& n, std::size_t i) { return n.parents[i]->value; }
void pacc(detail::Node& n, std::size_t i, const Matrix& g) { n.parents[i]->accumulate(g); }
}  // namespace

void detail::Node::accumulate(const Matrix& g) {
  if (!requires_grad) return;
  if (grad.size() == 0)
    grad = g;
  else
    grad += g;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Var Var::constant(Matrix value) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  return Var(std::move(n));
}

Var Var::parameter(Matrix value) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Var(std::move(n));
}

Var Var::scalar(double value) { return constant(Matrix::Constant(1, 1, value)); }

const Matrix& Var::value() const {
  if (!node_) throw UsageError("use of an undefined Var");
  return node_->value;
}

Matrix& Var::mutable_value() {
  if (!node_) throw UsageError("use of an undefined Var");
  return node_->value;
}

Matrix Var::grad() const {
  const Matrix& v = value();
  if (node_->grad.size() == 0) return Matrix::Zero(v.rows(), v.cols());
  return node_->grad;
}

bool Var::has_grad() const { return node_ && node_->grad.size() != 0; }

void Var::zero_grad() {
  if (node_) node_->grad.resize(0, 0);
}

bool Var::requires_grad() const { return node_ && node_->requires_grad; }

double Var::item() const {
  const Matrix& v = value();
  if (v.size() != 1) throw DimensionError("item() on non-scalar " + shape(v));
  return v(0, 0);
}

void Var::backward() const {
  if (!node_) throw UsageError("backward on an undefined Var");
  if (node_->value.size() != 1) throw UsageError("backward needs a 1x1 loss, got " + shape(node_->value));
  if (!node_->requires_grad) throw UsageError("backward on a value that records no graph");

  // Iterative post-order DFS gives a topological order.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      detail::Node* p = n->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (!n->backward || n->grad.size() == 0) continue;
    n->backward(*n);
    n->grad.resize(0, 0);  // intermediate gradients are consumed once
  }
}

Var make_result(Matrix value, std::vector<Var> parents, std::function<void(detail::Node&)> backward) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  if (g_grad_enabled) {
    bool any = false;
    for (const Var& p : parents) any = any || p.requires_grad();
    if (any) {
      n->requires_grad = true;
      n->parents.reserve(parents.size());
      for (const Var& p : parents) n->parents.push_back(p.node());
      n->backward = std::move(backward);
    }
  }
  return Var(std::move(n));
}

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + shape(a.value()) + " x " + shape(b.value()));
  Matrix out = a.value() * b.value();
  return make_result(std::move(out), {a, b}, [](detail::Node& n) {
    if (n.parents[0]->requires_grad) pacc(n, 0, n.grad * pv(n, 1).transpose());
    if (n.parents[1]->requires_grad) pacc(n, 1, pv(n, 0).transpose() * n.grad);
  });
}

Var add(const Var& a, const Var& b) {
  same_shape(a, b, "add");
  return make_result(a.value() + b.value(), {a, b}, [](detail::Node& n) {
    pacc(n, 0, n.grad);
    pacc(n, 1, n.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  same_shape(a, b, "sub");
  return make_result(a.value() - b.value(), {a, b}, [](detail::Node& n) {
    pacc(n, 0, n.grad);
    pacc(n, 1, -n.grad);
  });
}

Var mul(const Var& a, const Var& b) {
  same_shape(a, b, "mul");
  return make_result(a.value().cwiseProduct(b.value()), {a, b}, [](detail::Node& n) {
    pacc(n, 0, n.grad.cwiseProduct(pv(n, 1)));
    pacc(n, 1, n.grad.cwiseProduct(pv(n, 0)));
  });
}

Var scale(const Var& a, double s) {
  return make_result(a.value() * s, {a}, [s](detail::Node& n) { pacc(n, 0, n.grad * s); });
}

Var add_scalar(const Var& a, double s) {
  return make_result(a.value().array() + s, {a}, [](detail::Node& n) { pacc(n, 0, n.grad); });
}

Var scale_by(const Var& a, const Var& s) {
  if (s.value().size() != 1) throw DimensionError("scale_by: scale must be 1x1, got " + shape(s.value()));
  const double k = s.item();
  return make_result(a.value() * k, {a, s}, [](detail::Node& n) {
    pacc(n, 0, n.grad * pv(n, 1)(0, 0));
    pacc(n, 1, Matrix::Constant(1, 1, n.grad.cwiseProduct(pv(n, 0)).sum()));
  });
}

Var add_row(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw DimensionError("add_row: " + shape(a.value()) + " + " + shape(row.value()));
  Matrix out = a.value().rowwise() + row.value().row(0);
  return make_result(std::move(out), {a, row}, [](detail::Node& n) {
    pacc(n, 0, n.grad);
    pacc(n, 1, n.grad.colwise().sum());
  });
}

Var square(const Var& a) {
  return make_result(a.value().cwiseAbs2(), {a},
                     [](detail::Node& n) { pacc(n, 0, 2.0 * n.grad.cwiseProduct(pv(n, 0))); });
}

Var exp(const Var& a) {
  return make_result(a.value().array().exp().matrix(), {a},
                     [](detail::Node& n) { pacc(n, 0, n.grad.cwiseProduct(n.value)); });
}

Var tanh(const Var& a) {
  return make_result(a.value().array().tanh().matrix(), {a}, [](detail::Node& n) {
    pacc(n, 0, n.grad.cwiseProduct((1.0 - n.value.array().square()).matrix()));
  });
}

Var relu(const Var& a) {
  return make_result(a.value().cwiseMax(0.0), {a}, [](detail::Node& n) {
    pacc(n, 0, (pv(n, 0).array() > 0.0).select(n.grad.array(), 0.0).matrix());
  });
}

Var minimum(const Var& a, const Var& b) {
  same_shape(a, b, "minimum");
  return make_result(a.value().cwiseMin(b.value()), {a, b}, [](detail::Node& n) {
    const auto take_a = (pv(n, 0).array() <= pv(n, 1).array());
    pacc(n, 0, take_a.select(n.grad.array(), 0.0).matrix());
    pacc(n, 1, take_a.select(0.0, n.grad.array()).matrix());
  });
}

Var clamp(const Var& a, double lo, double hi) {
  return make_result(a.value().cwiseMax(lo).cwiseMin(hi), {a}, [lo, hi](detail::Node& n) {
    const auto& x = pv(n, 0).array();
    pacc(n, 0, (x > lo && x < hi).select(n.grad.array(), 0.0).matrix());
  });
}

Var sum(const Var& a) {
  return make_result(Matrix::Constant(1, 1, a.value().sum()), {a}, [](detail::Node& n) {
    pacc(n, 0, Matrix::Constant(pv(n, 0).rows(), pv(n, 0).cols(), n.grad(0, 0)));
  });
}

Var mean(const Var& a) {
  const double count = static_cast<double>(a.value().size());
  if (count == 0) throw DimensionError("mean of an empty matrix");
  return scale(sum(a), 1.0 / count);
}

Var mean_rows(const Var& a) {
  const double count = static_cast<double>(a.rows());
  if (count == 0) throw DimensionError("mean_rows of an empty matrix");
  Matrix out = a.value().colwise().sum() / count;
  return make_result(std::move(out), {a}, [count](detail::Node& n) {
    Matrix g = n.grad.replicate(pv(n, 0).rows(), 1) / count;
    pacc(n, 0, g);
  });
}

Var hcat(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("hcat of nothing");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw DimensionError("hcat: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return make_result(std::move(out), std::vector<Var>(parts.begin(), parts.end()), [](detail::Node& n) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const Eigen::Index w = n.parents[i]->value.cols();
      if (n.parents[i]->requires_grad) pacc(n, i, n.grad.middleCols(off, w));
      off += w;
    }
  });
}

Var vcat(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("vcat of nothing");
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw DimensionError("vcat: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return make_result(std::move(out), std::vector<Var>(parts.begin(), parts.end()), [](detail::Node& n) {
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const Eigen::Index h = n.parents[i]->value.rows();
      if (n.parents[i]->requires_grad) pacc(n, i, n.grad.middleRows(off, h));
      off += h;
    }
  });
}

Var repeat_rows(const Var& row, Eigen::Index count) {
  if (row.rows() != 1) throw DimensionError("repeat_rows expects a single row, got " + shape(row.value()));
  return make_result(row.value().replicate(count, 1), {row},
                     [](detail::Node& n) { pacc(n, 0, n.grad.colwise().sum()); });
}

Var select_row(const Var& a, Eigen::Index r) {
  if (r < 0 || r >= a.rows()) throw DimensionError("select_row: index out of range");
  return make_result(a.value().row(r), {a}, [r](detail::Node& n) {
    Matrix g = Matrix::Zero(pv(n, 0).rows(), pv(n, 0).cols());
    g.row(r) = n.grad.row(0);
    pacc(n, 0, g);
  });
}

Var pick(const Var& a, Eigen::Index r, Eigen::Index c) {
  if (r < 0 || r >= a.rows() || c < 0 || c >= a.cols()) throw DimensionError("pick: index out of range");
  return make_result(Matrix::Constant(1, 1, a.value()(r, c)), {a}, [r, c](detail::Node& n) {
    Matrix g = Matrix::Zero(pv(n, 0).rows(), pv(n, 0).cols());
    g(r, c) = n.grad(0, 0);
    pacc(n, 0, g);
  });
}

Var flatten_col(const Var& a) {
  const Eigen::Index r = a.rows(), c = a.cols();
  Matrix out = Eigen::Map<const Matrix>(a.value().data(), r * c, 1);
  return make_result(std::move(out), {a}, [r, c](detail::Node& n) {
    Matrix g = Eigen::Map<const Matrix>(n.grad.data(), r, c);
    pacc(n, 0, g);
  });
}

Var masked_log_softmax(const Var& logits, std::span<const std::uint8_t> mask) {
  if (logits.cols() != 1) throw DimensionError("masked_log_softmax expects a column, got " + shape(logits.value()));
  if (static_cast<Eigen::Index>(mask.size()) != logits.rows()) throw DimensionError("mask length mismatch");
  const Matrix& x = logits.value();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (mask[static_cast<std::size_t>(i)]) hi = std::max(hi, x(i, 0));
  if (hi == -std::numeric_limits<double>::infinity()) throw UsageError("masked_log_softmax: every entry is masked");
  double z = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (mask[static_cast<std::size_t>(i)]) z += std::exp(x(i, 0) - hi);
  const double lse = hi + std::log(z);
  Matrix out(x.rows(), 1);
  std::vector<std::uint8_t> keep(mask.begin(), mask.end());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i, 0) = keep[static_cast<std::size_t>(i)] ? x(i, 0) - lse : -std::numeric_limits<double>::infinity();
  return make_result(std::move(out), {logits}, [keep = std::move(keep)](detail::Node& n) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n.value.rows(); ++i)
      if (keep[static_cast<std::size_t>(i)]) total += n.grad(i, 0);
    Matrix g = Matrix::Zero(n.value.rows(), 1);
    for (Eigen::Index i = 0; i < n.value.rows(); ++i)
      if (keep[static_cast<std::size_t>(i)]) g(i, 0) = n.grad(i, 0) - std::exp(n.value(i, 0)) * total;
    pacc(n, 0, g);
  });
}

Var categorical_entropy(const Var& log_probs) {
  const Matrix& lp = log_probs.value();
  double h = 0.0;
  for (Eigen::Index i = 0; i < lp.size(); ++i) {
    const double l = lp.data()[i];
    if (std::isfinite(l)) h -= std::exp(l) * l;
  }
  return make_result(Matrix::Constant(1, 1, h), {log_probs}, [](detail::Node& n) {
    const Matrix& lp = pv(n, 0);
    Matrix g = Matrix::Zero(lp.rows(), lp.cols());
    for (Eigen::Index i = 0; i < lp.size(); ++i) {
      const double l = lp.data()[i];
      if (std::isfinite(l)) g.data()[i] = -n.grad(0, 0) * std::exp(l) * (l + 1.0);
    }
    pacc(n, 0, g);
  });
}

Var batch_norm(const Var& x, const Var& gamma, const Var& beta, double eps, Matrix* batch_mean,
               Matrix* batch_var) {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  if (gamma.rows() != 1 || gamma.cols() != cols || beta.rows() != 1 || beta.cols() != cols)
    throw DimensionError("batch_norm: affine parameters must be 1 x " + std::to_string(cols));
  if (rows == 0) throw DimensionError("batch_norm of an empty batch");
  const double count = static_cast<double>(rows);
  const Matrix mu = x.value().colwise().sum() / count;
  const Matrix centered = x.value().rowwise() - mu.row(0);
  const Matrix var = centered.cwiseAbs2().colwise().sum() / count;
  const Matrix inv_std = (var.array() + eps).rsqrt().matrix();
  Matrix xhat = centered.array().rowwise() * inv_std.row(0).array();
  if (batch_mean) *batch_mean = mu;
  if (batch_var) *batch_var = var;
  Matrix out = (xhat.array().rowwise() * gamma.value().row(0).array()).rowwise() + beta.value().row(0).array();
  return make_result(std::move(out), {x, gamma, beta}, [xhat, inv_std, count](detail::Node& n) {
    const Matrix& dy = n.grad;
    pacc(n, 2, dy.colwise().sum());
    pacc(n, 1, dy.cwiseProduct(xhat).colwise().sum());
    if (n.parents[0]->requires_grad) {
      const Matrix dxhat = dy.array().rowwise() * pv(n, 1).row(0).array();
      const Matrix sum_dxhat = dxhat.colwise().sum();
      const Matrix sum_dxhat_xhat = dxhat.cwiseProduct(xhat).colwise().sum();
      Matrix dx = (count * dxhat.array()).matrix();
      dx.rowwise() -= sum_dxhat.row(0);
      dx -= (xhat.array().rowwise() * sum_dxhat_xhat.row(0).array()).matrix();
      dx = (dx.array().rowwise() * (inv_std.row(0).array() / count)).matrix();
      pacc(n, 0, dx);
    }
  });
}

}  // namespace fogforge::nn
