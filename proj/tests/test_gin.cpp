#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fogforge/gin.hpp"
#include "oracles/finite_diff.hpp"

using namespace fogforge;
using namespace fogforge::nn;

namespace {

Matrix random_features(Eigen::Index n, Eigen::Index d, Rng& rng) {
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

Matrix random_graph(Eigen::Index n, double p, Rng& rng) {
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) a(i, j) = a(j, i) = 1.0;
  return a;
}

// P with P(i, perm[i]) = 1, so (P x) row i = x row perm[i].
Matrix permutation_matrix(const std::vector<Eigen::Index>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

std::vector<Eigen::Index> random_permutation(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i-- > 1;) std::swap(perm[i], perm[rng.index(i + 1)]);
  return perm;
}

GinConfig small_config() {
  GinConfig c;
  c.hidden_dim = 8;
  c.mlp_layers = 2;
  return c;
}

}  // namespace

TEST_SUITE("gin-encoder") {

TEST_CASE("pooled embedding is the node mean") {
  Rng rng(1);
  ParameterSet ps;
  const GinEncoder gin(ps, "g", GinConfig{}, rng);
  const Matrix x = random_features(9, 5, rng);
  const GraphEmbedding e = gin.forward(Var::constant(x), random_graph(9, 0.3, rng));
  CHECK(e.nodes.rows() == 9);
  CHECK(e.nodes.cols() == 64);
  CHECK((e.pooled.value() - e.nodes.value().colwise().mean()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("permutation invariance and equivariance") {
  Rng rng(2);
  ParameterSet ps;
  const GinEncoder gin(ps, "g", GinConfig{}, rng);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(12));
    const Matrix x = random_features(n, 5, rng);
    const Matrix a = random_graph(n, rng.uniform(), rng);
    const auto perm = random_permutation(n, rng);
    const Matrix p = permutation_matrix(perm);
    const GraphEmbedding e1 = gin.forward(Var::constant(x), a);
    const GraphEmbedding e2 = gin.forward(Var::constant(p * x), p * a * p.transpose());
    CHECK((e1.pooled.value() - e2.pooled.value()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((p * e1.nodes.value() - e2.nodes.value()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("no edges means no mixing between nodes") {
  Rng rng(3);
  ParameterSet ps;
  GinConfig c = small_config();
  const GinEncoder gin(ps, "g", c, rng);
  const Matrix x = random_features(4, 5, rng);
  // running statistics keep rows independent of each other
  const Matrix all = gin.forward(Var::constant(x), Matrix::Zero(4, 4), NormMode::Running).nodes.value();
  for (Eigen::Index v = 0; v < 4; ++v) {
    const Matrix one = gin.forward(Var::constant(x.row(v)), Matrix::Zero(1, 1), NormMode::Running).nodes.value();
    CHECK((one - all.row(v)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("eps scales the self term") {
  Rng rng(4);
  ParameterSet ps;
  GinConfig c = small_config();
  c.batch_norm = false;
  c.k_iterations = 1;
  c.activation = Activation::Identity;
  c.mlp_layers = 1;
  const GinEncoder gin(ps, "g", c, rng);
  const Matrix x = random_features(3, 5, rng);
  const Matrix a{{0, 1, 0}, {1, 0, 1}, {0, 1, 0}};
  auto eps = gin.epsilons()[0];
  eps.mutable_value()(0, 0) = 0.5;
  // identity activations: h0 = x W0 + b0, h1 = ((1.5) h0 + A h0) W1 + b1
  const auto& l0 = gin.mlps()[0].layers()[0];
  const auto& l1 = gin.mlps()[1].layers()[0];
  const Matrix h0 = (x * l0.weight.value()).rowwise() + l0.bias.value().row(0);
  const Matrix h1 = ((1.5 * h0 + a * h0) * l1.weight.value()).rowwise() + l1.bias.value().row(0);
  const Matrix got = gin.forward(Var::constant(x), a).nodes.value();
  CHECK((got - h1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single node graph") {
  Rng rng(5);
  ParameterSet ps;
  const GinEncoder gin(ps, "g", small_config(), rng);
  const GraphEmbedding e = gin.forward(Var::constant(random_features(1, 5, rng)), Matrix::Zero(1, 1));
  CHECK(e.pooled.value() == e.nodes.value());
}

TEST_CASE("gradients through eps, mlps and inputs") {
  Rng rng(6);
  for (int trial = 0; trial < 3; ++trial) {
    ParameterSet ps;
    GinConfig c = small_config();
    c.epsilon_init = rng.uniform();
    const GinEncoder gin(ps, "g", c, rng);
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.index(4));
    const Matrix x = random_features(n, 5, rng);
    const Matrix a = random_graph(n, 0.5, rng);
    const Matrix w = random_features(1, 8, rng);
    auto loss = [&](const Var& feats) {
      const GraphEmbedding e = gin.forward(feats, a);
      return add(sum(mul(e.pooled, Var::constant(w))), mean(square(e.nodes)));
    };
    CHECK(oracle::check_parameter_gradients(ps.trainable(), [&] { return loss(Var::constant(x)); }).max_rel_error < 1e-4);
    CHECK(oracle::check_gradients([&](const auto& v) { return loss(v[0]); }, {x}).max_rel_error < 1e-4);
    bool eps_has_grad = false;
    for (const auto& [name, p] : ps.parameters())
      if (name.find("eps") != std::string::npos) eps_has_grad = eps_has_grad || p.grad()(0, 0) != 0.0;
    CHECK(eps_has_grad);
  }
}

TEST_CASE("dimension checks") {
  Rng rng(7);
  ParameterSet ps;
  const GinEncoder gin(ps, "g", small_config(), rng);
  CHECK_THROWS_AS(gin.forward(Var::constant(Matrix::Zero(3, 4)), Matrix::Zero(3, 3)), DimensionError);
  CHECK_THROWS_AS(gin.forward(Var::constant(Matrix::Zero(3, 5)), Matrix::Zero(2, 2)), DimensionError);
  GinConfig bad = small_config();
  bad.k_iterations = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("deterministic in inference mode") {
  Rng rng(8);
  ParameterSet ps;
  const GinEncoder gin(ps, "g", GinConfig{}, rng);
  const Matrix x = random_features(6, 5, rng);
  const Matrix a = random_graph(6, 0.4, rng);
  CHECK(gin.forward(Var::constant(x), a, NormMode::Running).nodes.value() ==
        gin.forward(Var::constant(x), a, NormMode::Running).nodes.value());
}

}  // TEST_SUITE
