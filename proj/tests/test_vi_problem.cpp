#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "test_support.hpp"
#include "vilt/experiment.hpp"
#include "vilt/vi_problem.hpp"
#include "vilt/vlt_io.hpp"

using namespace vilt;
using test_support::random_dense_problem;
using test_support::random_solvable_problem;
using test_support::random_tensor;

namespace {

VIProblem scalar_problem(double l, double y, const Activation& act) {
  std::vector<Sample> samples;
  samples.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {l}),
                     Tensor(Shape{1}, {y}), 1.0});
  return VIProblem(std::move(samples), act, ConstraintSet::whole_space(), Shape{1});
}

}  // namespace

TEST_CASE("residual vanishes at an interpolating point") {
  const auto p = scalar_problem(1.0, 2.0, Activation::identity());
  const Tensor f = p.residual_map(Tensor(Shape{1}, {2.0}));
  CHECK(f[0] == 0.0);
}

TEST_CASE("identity problem: F(theta) = theta for y = 0") {
  const auto p = scalar_problem(1.0, 0.0, Activation::identity());
  const Tensor f = p.residual_map(Tensor(Shape{1}, {3.0}));
  CHECK(f[0] == 3.0);
}

TEST_CASE("two-sample residual, hand evaluated") {
  std::vector<Sample> samples;
  samples.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {1.0}),
                     Tensor(Shape{1}, {1.0}), 0.5});
  samples.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {2.0}),
                     Tensor(Shape{1}, {1.0}), 0.5});
  const VIProblem p(std::move(samples), Activation::identity(),
                    ConstraintSet::whole_space(), Shape{1});
  // 0.5*1*(1-1) + 0.5*2*(2-1) = 1
  const Tensor f = p.residual_map(Tensor(Shape{1}, {1.0}));
  CHECK(f[0] == 1.0);
}

TEST_CASE("construction validation") {
  std::vector<Sample> none;
  CHECK_THROWS_AS(VIProblem(std::move(none), Activation::identity(),
                            ConstraintSet::whole_space(), Shape{1}),
                  std::invalid_argument);

  auto bad_weight = [] {
    std::vector<Sample> s;
    s.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {1.0}),
                 Tensor(Shape{1}), 0.7});
    return VIProblem(std::move(s), Activation::identity(),
                     ConstraintSet::whole_space(), Shape{1});
  };
  CHECK_THROWS_AS(bad_weight(), std::invalid_argument);

  auto bad_domain = [] {
    std::vector<Sample> s;
    s.push_back({LinearOperator::dense(Shape{2}, Shape{1}, {1.0, 0.0}),
                 Tensor(Shape{1}), 1.0});
    return VIProblem(std::move(s), Activation::identity(),
                     ConstraintSet::whole_space(), Shape{1});
  };
  CHECK_THROWS_AS(bad_domain(), std::invalid_argument);
}

TEST_CASE("max step size from operator norms") {
  std::vector<Sample> samples;
  samples.push_back({LinearOperator::dense(Shape{2}, Shape{2}, {3, 0, 0, 4}),
                     Tensor(Shape{2}), 1.0});
  const VIProblem p(std::move(samples), Activation::identity(),
                    ConstraintSet::whole_space(), Shape{2});
  CHECK(p.max_step_size() == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("max step size takes the max over samples") {
  std::vector<Sample> samples;
  samples.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {1.0}),
                     Tensor(Shape{1}), 0.5});
  samples.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {2.0}),
                     Tensor(Shape{1}), 0.5});
  const VIProblem p(std::move(samples), Activation::identity(),
                    ConstraintSet::whole_space(), Shape{1});
  CHECK(p.max_step_size() == doctest::Approx(0.5).epsilon(1e-9));
  // the working choice 1.9/max||L||^2 sits at 95% of the admissible range
  CHECK(1.9 / p.max_norm_sq() == doctest::Approx(0.95 * p.max_step_size()));
}

TEST_CASE("zero operator family is degenerate") {
  std::vector<Sample> samples;
  samples.push_back({LinearOperator::dense(Shape{1}, Shape{1}, {0.0}),
                     Tensor(Shape{1}), 1.0});
  const VIProblem p(std::move(samples), Activation::identity(),
                    ConstraintSet::whole_space(), Shape{1});
  CHECK_THROWS_WITH_AS(p.max_step_size(),
                       "degenerate problem: zero operator family",
                       std::domain_error);
}

TEST_CASE("natural residual: zero at solutions, gamma*||F|| on whole space") {
  const auto p = scalar_problem(1.0, 5.0, Activation::identity());
  CHECK(p.natural_residual(Tensor(Shape{1}, {5.0}), 0.7) == 0.0);
  // theta=3, y=0 problem: residual = gamma*|F| = 0.5*3
  const auto q = scalar_problem(1.0, 0.0, Activation::identity());
  CHECK(q.natural_residual(Tensor(Shape{1}, {3.0}), 0.5) ==
        doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("training error examples") {
  const auto p = scalar_problem(1.0, 2.0, Activation::identity());
  CHECK(p.training_error(Tensor(Shape{1}, {2.0}), 1) == 0.0);
  CHECK(p.training_error(Tensor(Shape{1}, {2.0}), 2) == 0.0);

  // K=1 with residual vector (1,-1): l1 error 2
  std::vector<Sample> s1;
  s1.push_back({LinearOperator::dense(Shape{2}, Shape{2}, {1, 0, 0, 1}),
                Tensor(Shape{2}, {0.0, 1.0}), 1.0});
  const VIProblem q(std::move(s1), Activation::identity(),
                    ConstraintSet::whole_space(), Shape{2});
  CHECK(q.training_error(Tensor(Shape{2}, {1.0, 0.0}), 1) == 2.0);

  // K=2 with residual vectors (3,4) and (0,0): l2 error (25+0)/2
  std::vector<Sample> s2;
  s2.push_back({LinearOperator::dense(Shape{2}, Shape{2}, {1, 0, 0, 1}),
                Tensor(Shape{2}, {-3.0, -4.0}), 0.5});
  s2.push_back({LinearOperator::dense(Shape{2}, Shape{2}, {1, 0, 0, 1}),
                Tensor(Shape{2}), 0.5});
  const VIProblem r(std::move(s2), Activation::identity(),
                    ConstraintSet::whole_space(), Shape{2});
  CHECK(r.training_error(Tensor(Shape{2}), 2) == 12.5);
}

TEST_CASE("exactness: solvable instances have residual zero at theta*") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto act = (trial % 2 == 0) ? Activation::leaky_relu(0.01)
                                      : Activation::identity();
    const auto cset = (trial % 3 == 0)
                          ? ConstraintSet::box(-1.0, 1.0)
                          : ConstraintSet::whole_space();
    auto inst = random_solvable_problem(4, 6, 5, act, cset, rng);
    const Tensor f = inst.problem.residual_map(inst.theta_star);
    CHECK(norm_linf(f) == 0.0);
    for (double gamma : {0.1, 1.0, 5.0}) {
      CHECK(inst.problem.natural_residual(inst.theta_star, gamma) == 0.0);
    }
  }
}

TEST_CASE("monotonicity of F under firmly nonexpansive activations") {
  Rng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = random_dense_problem(3, 5, 4, Activation::leaky_relu(0.01),
                                        ConstraintSet::whole_space(), rng);
    for (int pair = 0; pair < 40; ++pair) {
      const Tensor a = random_tensor(p.param_shape(), rng, -2.0, 2.0);
      const Tensor b = random_tensor(p.param_shape(), rng, -2.0, 2.0);
      const Tensor fa = p.residual_map(a), fb = p.residual_map(b);
      double inner = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        inner += (a[i] - b[i]) * (fa[i] - fb[i]);
      }
      CHECK(inner >= -1e-10);
    }
  }
}

TEST_CASE("Lipschitz bound: ||F(a)-F(b)|| <= max||L||^2 ||a-b||") {
  Rng rng(103);
  const auto p = random_dense_problem(5, 6, 4, Activation::leaky_relu(0.5),
                                      ConstraintSet::whole_space(), rng);
  const double lip = p.max_norm_sq();
  for (int pair = 0; pair < 100; ++pair) {
    const Tensor a = random_tensor(p.param_shape(), rng, -2.0, 2.0);
    const Tensor b = random_tensor(p.param_shape(), rng, -2.0, 2.0);
    const Tensor fa = p.residual_map(a), fb = p.residual_map(b);
    double df = 0.0, dx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      df += (fa[i] - fb[i]) * (fa[i] - fb[i]);
      dx += (a[i] - b[i]) * (a[i] - b[i]);
    }
    CHECK(std::sqrt(df) <= lip * std::sqrt(dx) * (1.0 + 1e-6));
  }
}

TEST_CASE("weight rescaling leaves the residual unchanged") {
  Rng rng(107);
  const Shape domain{4}, codomain{3};
  std::vector<std::vector<double>> mats;
  std::vector<Tensor> targets;
  std::vector<double> weights = {0.1, 0.4, 0.2, 0.3};
  for (int k = 0; k < 4; ++k) {
    std::vector<double> m(12);
    for (double& x : m) x = rng.uniform(-1.0, 1.0);
    mats.push_back(m);
    targets.push_back(random_tensor(codomain, rng));
  }
  auto build = [&](const std::vector<double>& w) {
    std::vector<Sample> s;
    for (int k = 0; k < 4; ++k) {
      s.push_back({LinearOperator::dense(domain, codomain, mats[k]),
                   targets[k], w[k]});
    }
    return VIProblem(std::move(s), Activation::leaky_relu(0.2),
                     ConstraintSet::whole_space(), domain);
  };
  // scale all weights by 3 and renormalize: identical weights, so identical F
  std::vector<double> scaled = weights;
  double total = 0.0;
  for (double& x : scaled) {
    x *= 3.0;
    total += x;
  }
  for (double& x : scaled) x /= total;
  const auto p1 = build(weights), p2 = build(scaled);
  const Tensor theta = random_tensor(domain, rng);
  const Tensor f1 = p1.residual_map(theta), f2 = p2.residual_map(theta);
  for (std::size_t i = 0; i < f1.size(); ++i) {
    CHECK(std::abs(f1[i] - f2[i]) <= 1e-12 * (1.0 + std::abs(f1[i])));
  }
}

TEST_CASE("bias augmentation: interpolation with a learnable bias") {
  Rng rng(109);
  // L(w,b) = A w + b; generate a solvable instance in the augmented space
  const Shape core{3}, codomain{2};
  std::vector<double> m(6);
  for (double& x : m) x = rng.uniform(-1.0, 1.0);
  auto op = LinearOperator::with_bias(
      LinearOperator::dense(core, codomain, std::move(m)));
  const Tensor theta_star = random_tensor(op.domain_shape(), rng);
  Tensor y = op.apply(theta_star);
  const Activation act = Activation::leaky_relu(0.01);
  act.apply_inplace(y);
  std::vector<Sample> samples;
  samples.push_back({op, y, 1.0});
  const VIProblem p(std::move(samples), act, ConstraintSet::whole_space(),
                    op.domain_shape());
  CHECK(norm_linf(p.residual_map(theta_star)) == 0.0);
}

TEST_CASE("problem manifest round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vilt_manifest_test";
  fs::create_directories(dir);
  Rng rng(211);

  const Shape kshape{2, 1, 3, 3};
  std::vector<std::string> feats, tgts;
  std::vector<double> weights;
  for (int k = 0; k < 3; ++k) {
    const Tensor f = random_tensor(Shape{2, 6, 6}, rng);
    const Tensor t = random_tensor(Shape{6, 6}, rng);
    feats.push_back("f" + std::to_string(k) + ".vlt");
    tgts.push_back("t" + std::to_string(k) + ".vlt");
    write_vlt1(dir / feats.back(), f);
    write_vlt1(dir / tgts.back(), t);
    weights.push_back(1.0 / 3.0);
  }
  write_problem_manifest(dir / "problem.json", feats, tgts, weights, kshape,
                         "leaky_relu:0.001", "none");
  const VIProblem p = load_problem_manifest(dir / "problem.json");
  CHECK(p.num_samples() == 3);
  CHECK(p.param_shape() == kshape);
  CHECK(p.activation().slope() == 0.001);
  CHECK(p.sample(0).op.codomain_shape() == Shape{6, 6});
  fs::remove_all(dir);
}
