#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vilt/linops.hpp"
#include "vilt/rng.hpp"

using namespace vilt;

namespace {

Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

void check_adjoint_identity(const LinearOperator& op, Rng& rng, int pairs) {
  for (int it = 0; it < pairs; ++it) {
    const Tensor u = random_tensor(op.domain_shape(), rng);
    const Tensor v = random_tensor(op.codomain_shape(), rng);
    const double lhs = dot(op.apply(u), v);
    const double rhs = dot(u, op.adjoint_apply(v));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
  }
}

LinearOperator random_dense(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> m(rows * cols);
  for (double& x : m) x = rng.uniform(-1.0, 1.0);
  return LinearOperator::dense(Shape{cols}, Shape{rows}, std::move(m));
}

LinearOperator random_conv_features(std::size_t cin, std::size_t cout,
                                    std::size_t n, std::size_t h,
                                    std::size_t w, Rng& rng) {
  Tensor feat(cin == 1 ? Shape{n, n} : Shape{cin, n, n});
  for (std::size_t i = 0; i < feat.size(); ++i) feat[i] = rng.uniform(-1.0, 1.0);
  return LinearOperator::conv_features(std::move(feat), Shape{cin, cout, h, w});
}

}  // namespace

TEST_CASE("dense apply: diagonal action") {
  const auto op = LinearOperator::dense(Shape{2}, Shape{2}, {1, 0, 0, 2});
  const Tensor u(Shape{2}, {3, 4});
  const Tensor out = op.apply(u);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 8.0);
}

TEST_CASE("dense apply rejects shape mismatch") {
  const auto op = LinearOperator::dense(Shape{2}, Shape{2}, {1, 0, 0, 2});
  CHECK_THROWS_AS(op.apply(Tensor(Shape{3})), std::invalid_argument);
  CHECK_THROWS_AS(op.adjoint_apply(Tensor(Shape{2, 2})), std::invalid_argument);
}

TEST_CASE("dense adjoint: transpose action") {
  const auto op = LinearOperator::dense(Shape{2}, Shape{2}, {1, 2, 3, 4});
  const Tensor v(Shape{2}, {1, 1});
  const Tensor out = op.adjoint_apply(v);
  CHECK(out[0] == 4.0);
  CHECK(out[1] == 6.0);
}

TEST_CASE("adjoint of zero is zero") {
  Rng rng(7);
  const auto op = random_conv_features(2, 2, 4, 3, 3, rng);
  const Tensor z = op.adjoint_apply(Tensor(op.codomain_shape()));
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);
}

TEST_CASE("conv2d: 1x1 scalar convolution") {
  Tensor feat(Shape{1, 1}, {5});
  const auto op = LinearOperator::conv_features(feat, Shape{1, 1, 1, 1});
  const Tensor out = op.apply(Tensor(Shape{1, 1, 1, 1}, {2}));
  CHECK(out.shape() == Shape{1, 1});
  CHECK(out[0] == 10.0);
}

TEST_CASE("conv2d: 3x3 of ones over a 3x3 image of ones") {
  Tensor feat(Shape{3, 3});
  feat.fill(1.0);
  const auto op = LinearOperator::conv_features(feat, Shape{1, 1, 3, 3});
  Tensor kernel(Shape{1, 1, 3, 3});
  kernel.fill(1.0);
  const Tensor out = op.apply(kernel);
  // Hand summation over the 3x3 window: the fully interior center pixel sums
  // all nine ones, the corners only the in-bounds 2x2 block.
  CHECK(out[4] == 9.0);
  CHECK(out[0] == 4.0);
  CHECK(out[2] == 4.0);
  CHECK(out[1] == 6.0);
}

TEST_CASE("conv2d apply agrees with the naive quadruple-loop oracle") {
  Rng rng(11);
  for (std::size_t n : {3, 4, 5, 8}) {
    for (std::size_t h : {1, 3, 5}) {
      for (std::size_t cin : {1, 3}) {
        for (std::size_t cout : {1, 2}) {
          Tensor feat(cin == 1 ? Shape{n, n} : Shape{cin, n, n});
          for (std::size_t i = 0; i < feat.size(); ++i) {
            feat[i] = rng.uniform(-1.0, 1.0);
          }
          const auto op =
              LinearOperator::conv_features(feat, Shape{cin, cout, h, h});
          Tensor kernel(Shape{cin, cout, h, h});
          for (std::size_t i = 0; i < kernel.size(); ++i) {
            kernel[i] = rng.uniform(-1.0, 1.0);
          }
          const Tensor out = op.apply(kernel);
          const auto expect = oracles::conv2d_naive(
              feat.values(), cin, n, kernel.values(), cout, h, h);
          REQUIRE(out.size() == expect.size());
          for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i] == expect[i]);  // identical summation order
          }
        }
      }
    }
  }
}

TEST_CASE("adjoint identity: 100 random pairs per operator kind") {
  Rng rng(23);
  check_adjoint_identity(random_dense(7, 5, rng), rng, 100);
  check_adjoint_identity(random_conv_features(3, 2, 6, 3, 3, rng), rng, 100);
  Tensor kernels = random_tensor(Shape{3, 2, 3, 3}, rng);
  check_adjoint_identity(LinearOperator::conv_kernel(kernels, 6), rng, 100);
}

TEST_CASE("adjoint identity for the bias-augmented operator") {
  Rng rng(29);
  auto op = LinearOperator::with_bias(random_dense(4, 3, rng));
  CHECK(op.domain_shape() == Shape{7});
  check_adjoint_identity(op, rng, 100);
}

TEST_CASE("bias augmentation adds the bias part") {
  const auto identity2 = LinearOperator::dense(Shape{2}, Shape{2}, {1, 0, 0, 1});
  const auto op = LinearOperator::with_bias(identity2);
  const Tensor out = op.apply(Tensor(Shape{4}, {1, 2, 10, 20}));
  CHECK(out[0] == 11.0);
  CHECK(out[1] == 22.0);
  const Tensor adj = op.adjoint_apply(Tensor(Shape{2}, {3, 4}));
  CHECK(adj[0] == 3.0);
  CHECK(adj[1] == 4.0);
  CHECK(adj[2] == 3.0);
  CHECK(adj[3] == 4.0);
}

TEST_CASE("linearity of apply") {
  Rng rng(31);
  const auto op = random_conv_features(2, 1, 5, 3, 3, rng);
  for (int it = 0; it < 20; ++it) {
    const Tensor u = random_tensor(op.domain_shape(), rng);
    const Tensor v = random_tensor(op.domain_shape(), rng);
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    Tensor combo(op.domain_shape());
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * u[i] + b * v[i];
    const Tensor lhs = op.apply(combo);
    const Tensor fu = op.apply(u), fv = op.apply(v);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = a * fu[i] + b * fv[i];
      CHECK(std::abs(lhs[i] - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("norm_sq of diag(3,4) is 16") {
  const auto op = LinearOperator::dense(Shape{2}, Shape{2}, {3, 0, 0, 4});
  const auto est = operator_norm_sq(op);
  CHECK(est.norm_sq == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("norm_sq of the nilpotent shift is 1") {
  const auto op = LinearOperator::dense(Shape{2}, Shape{2}, {0, 1, 0, 0});
  const auto est = operator_norm_sq(op);
  CHECK(est.norm_sq == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero operator short-circuits") {
  const auto op = LinearOperator::dense(Shape{3}, Shape{2}, std::vector<double>(6, 0.0));
  const auto est = operator_norm_sq(op);
  CHECK(est.norm_sq == 0.0);
  CHECK(est.iterations == 0);
}

TEST_CASE("power iteration matches the Jacobi SVD oracle on random matrices") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 2 + rng.below(7);
    const std::size_t cols = 2 + rng.below(7);
    std::vector<double> m(rows * cols);
    for (double& x : m) x = rng.uniform(-1.0, 1.0);
    const double expect = oracles::max_sv_sq(m, rows, cols);
    const auto op = LinearOperator::dense(Shape{cols}, Shape{rows}, m);
    const auto est = operator_norm_sq(op, 1e-12, 20000);
    CHECK(std::abs(est.norm_sq - expect) <= 1e-6 * expect);
  }
}

TEST_CASE("norm domination: ||Lu||^2 <= norm_sq * ||u||^2") {
  Rng rng(43);
  const auto op = random_conv_features(2, 1, 6, 3, 3, rng);
  const double norm_sq = operator_norm_sq(op, 1e-12, 20000).norm_sq;
  for (int it = 0; it < 50; ++it) {
    const Tensor u = random_tensor(op.domain_shape(), rng);
    CHECK(norm_l2_sq(op.apply(u)) <= norm_sq * norm_l2_sq(u) * (1.0 + 1e-6));
  }
}

TEST_CASE("conv shape bookkeeping") {
  Rng rng(47);
  const auto op = random_conv_features(8, 1, 16, 5, 5, rng);
  CHECK(op.domain_shape() == Shape{8, 1, 5, 5});
  CHECK(op.codomain_shape() == Shape{16, 16});
  const auto multi = random_conv_features(3, 4, 6, 3, 3, rng);
  CHECK(multi.codomain_shape() == Shape{4, 6, 6});
  CHECK_THROWS_AS(
      LinearOperator::conv_features(Tensor(Shape{2, 4, 4}), Shape{3, 1, 3, 3}),
      std::invalid_argument);
}
