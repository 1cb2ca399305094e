// Helpers for building small random problem instances in the test suites.
#pragma once

#include <vector>

#include "vilt/rng.hpp"
#include "vilt/vi_problem.hpp"

namespace test_support {

inline vilt::Tensor random_tensor(const vilt::Shape& shape, vilt::Rng& rng,
                                  double lo = -1.0, double hi = 1.0) {
  vilt::Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

inline std::vector<double> normalized_weights(std::size_t k, vilt::Rng& rng,
                                              bool uniform = false) {
  std::vector<double> w(k, 1.0);
  if (!uniform) {
    for (double& x : w) x = rng.uniform(0.2, 1.0);
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

/// K dense operators dim -> codim with uniform random entries, random
/// positive weights summing to one, random targets.
inline vilt::VIProblem random_dense_problem(
    std::size_t k, std::size_t dim, std::size_t codim,
    const vilt::Activation& act, const vilt::ConstraintSet& cset,
    vilt::Rng& rng, bool uniform_weights = false) {
  const vilt::Shape domain{dim}, codomain{codim};
  const auto weights = normalized_weights(k, rng, uniform_weights);
  std::vector<vilt::Sample> samples;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> m(dim * codim);
    for (double& x : m) x = rng.uniform(-1.0, 1.0);
    samples.push_back({vilt::LinearOperator::dense(domain, codomain, std::move(m)),
                       random_tensor(codomain, rng), weights[i]});
  }
  return vilt::VIProblem(std::move(samples), act, cset, domain);
}

struct SolvableInstance {
  vilt::VIProblem problem;
  vilt::Tensor theta_star;
};

/// Targets generated as y_k = R(L_k theta*) with theta* feasible, so the
/// ideal interpolation problem has the known solution theta*.
inline SolvableInstance random_solvable_problem(
    std::size_t k, std::size_t dim, std::size_t codim,
    const vilt::Activation& act, const vilt::ConstraintSet& cset,
    vilt::Rng& rng) {
  const vilt::Shape domain{dim}, codomain{codim};
  vilt::Tensor theta_star = cset.project(random_tensor(domain, rng));
  const auto weights = normalized_weights(k, rng);
  std::vector<vilt::Sample> samples;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> m(dim * codim);
    for (double& x : m) x = rng.uniform(-1.0, 1.0);
    auto op = vilt::LinearOperator::dense(domain, codomain, std::move(m));
    vilt::Tensor y = op.apply(theta_star);
    act.apply_inplace(y);
    samples.push_back({std::move(op), std::move(y), weights[i]});
  }
  return {vilt::VIProblem(std::move(samples), act, cset, domain),
          std::move(theta_star)};
}

}  // namespace test_support
