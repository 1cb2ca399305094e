#pragma once

#include <cstdint>
#include <vector>

#include "vilt/schedule.hpp"
#include "vilt/trace.hpp"
#include "vilt/vi_problem.hpp"

namespace vilt {

/// Dual stopping rule: natural residual below `residual_tol` (checked at
/// epoch boundaries; 0 disables the check) or `max_iter` iterations.
struct StopRule {
  std::size_t max_iter = 100000;
  double residual_tol = 1e-8;
};

struct SolverOptions {
  double gamma = 0.0;
  StopRule stop;
  /// Skips the step-size range check (for divergence experiments only).
  bool allow_unsafe_gamma = false;
  /// When false the trace's wall_ms column is written as 0 so that repeated
  /// runs produce byte-identical CSVs.
  bool record_wall_time = false;
};

/// Single relaxed interpolation step: theta - gamma * L*(R(L theta) - y).
/// Validates gamma against 2/||L||^2 unless `allow_unsafe` is set.
Tensor forward_step(const Tensor& theta, double gamma, const Sample& s,
                    const Activation& activation, bool allow_unsafe = false);

/// Final internal state of a run, exported on request so tests can re-check
/// the maintained sums by full resummation.
struct Alg1State {
  Tensor theta;
  std::vector<Tensor> memories;  // one per sample
  Tensor consensus;              // maintained sum_k w_k memories[k]
  std::size_t iteration = 0;
};

struct Alg2State {
  Tensor theta;
  std::vector<Tensor> aggregates;  // one per batch
  Tensor running_sum;              // maintained sum_j aggregates[j]
  std::size_t iteration = 0;
};

/// Block-iterative forward-backward iteration with one memory vector per
/// sample:
///   for k in K_n:  m_k <- theta - gamma L_k*(R(L_k theta) - y_k)
///   theta <- proj_C( sum_k w_k m_k )
/// The weighted consensus sum is maintained incrementally (the selected
/// block's old contribution is subtracted and its new one added), which
/// keeps the per-iteration cost at O(|K_n|) operator applications; the
/// drift against full resummation stays below 1e-9 and is re-checkable.
/// `memories0` defaults to K copies of theta0.
Trace run_alg1(const VIProblem& p, Schedule sched, const SolverOptions& opt,
               const Tensor& theta0,
               const std::vector<Tensor>* memories0 = nullptr,
               Alg1State* final_state = nullptr);

/// Batch variant that keeps only one aggregate vector per batch of the
/// partition, plus the running sum and the iterate:
///   a_j <- sum_{k in K_j} w_k (theta - gamma L_k*(R(L_k theta) - y_k))
///   sum <- sum + a_j_new - a_j_old
///   theta <- proj_C(sum)
/// `aggregates0[j]` defaults to sum_{k in K_j} w_k * theta0. The schedule
/// must select exactly one batch index per iteration.
Trace run_alg2(const VIProblem& p,
               const std::vector<std::vector<std::size_t>>& partition,
               Schedule sched, const SolverOptions& opt, const Tensor& theta0,
               const std::vector<Tensor>* aggregates0 = nullptr,
               Alg2State* final_state = nullptr);

enum class Loss { l1, l2 };

struct BaselineOptions {
  Loss loss = Loss::l1;
  double lr = 1e-3;
  std::size_t batch = 0;  // 0 = full batch; must divide the sample count
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  bool record_wall_time = false;
  /// When non-empty, gradients are taken over these fixed batches (visited
  /// in a freshly shuffled order each epoch) instead of shuffled chunks of
  /// size `batch`.
  std::vector<std::vector<std::size_t>> partition;
  // Adam moments
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Mini-batch subgradient descent on (1/K) sum_k loss(R(L_k theta), y_k).
/// Conventions: the l1 subgradient at 0 is 0; the LeakyReLU derivative at 0
/// is 1; the l2 loss gradient carries the factor 2.
Trace run_sgd(const VIProblem& p, const BaselineOptions& opt,
              const Tensor& theta0);

/// Adam on the same subgradients, with standard bias correction.
Trace run_adam(const VIProblem& p, const BaselineOptions& opt,
               const Tensor& theta0);

}  // namespace vilt
