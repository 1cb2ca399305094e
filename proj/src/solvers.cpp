#include "vilt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vilt {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_gamma(double gamma, double max_norm_sq, bool allow_unsafe) {
  if (!(gamma > 0.0)) throw std::invalid_argument("step size gamma must be > 0");
  if (allow_unsafe) return;
  // Inflate the norm estimate so a slight power-iteration underestimate
  // cannot admit an out-of-range step.
  if (!(gamma * (max_norm_sq * (1.0 + 1e-6)) < 2.0)) {
    throw std::invalid_argument("step size gamma=" + std::to_string(gamma) +
                                " outside ]0, 2/max||L||^2[");
  }
}

struct Workspace {
  Tensor z;  // codomain scratch
  Tensor t;  // parameter scratch (adjoint result)
};

// acc[i] += w_k * (theta[i] - gamma * t_k[i]) summed over `set` in order,
// where t_k = L_k*(R(L_k theta) - y_k). When `memories` is given, the
// unweighted step theta - gamma*t_k is stored into (*memories)[k] as well.
// Both solver variants funnel through this one kernel so that matched runs
// perform identical floating-point work.
void weighted_forward_sum(const VIProblem& p,
                          const std::vector<std::size_t>& set,
                          const Tensor& theta, double gamma, Tensor& acc,
                          std::vector<Tensor>* memories, Workspace& ws) {
  const Activation& act = p.activation();
  for (std::size_t k : set) {
    const Sample& s = p.sample(k);
    s.op.apply_into(theta, ws.z);
    act.apply_inplace(ws.z);
    sub_inplace(ws.z, s.target);
    s.op.adjoint_into(ws.z, ws.t);
    const double w = s.weight;
    const std::size_t n = acc.size();
    if (memories) {
      Tensor& mem = (*memories)[k];
      for (std::size_t i = 0; i < n; ++i) {
        const double v = theta[i] - gamma * ws.t[i];
        mem[i] = v;
        acc[i] += w * v;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double v = theta[i] - gamma * ws.t[i];
        acc[i] += w * v;
      }
    }
  }
}

// acc[i] += w_k * memories[k][i] over `set` in order.
void weighted_memory_sum(const VIProblem& p,
                         const std::vector<std::size_t>& set,
                         const std::vector<Tensor>& memories, Tensor& acc) {
  for (std::size_t k : set) {
    const double w = p.sample(k).weight;
    const Tensor& mem = memories[k];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * mem[i];
  }
}

struct EpochMonitor {
  const VIProblem& p;
  double gamma_for_residual;
  std::size_t total_samples;
  bool record_wall;
  Clock::time_point start = Clock::now();

  std::size_t samples_seen = 0;
  std::size_t epochs_done = 0;
  std::size_t last_recorded_iter = static_cast<std::size_t>(-1);

  void record(Trace& trace, const Tensor& theta, std::size_t iteration) {
    TraceRecord r;
    r.iteration = iteration;
    r.epoch = epochs_done;
    r.l1_err = p.training_error(theta, 1);
    r.l2_err = p.training_error(theta, 2);
    r.nat_res = p.natural_residual(theta, gamma_for_residual);
    r.wall_ms = record_wall ? elapsed_ms(start) : 0.0;
    trace.records.push_back(r);
    last_recorded_iter = iteration;
  }

  // Returns true when the step completed an epoch (time to monitor).
  bool advance(std::size_t selected_count) {
    samples_seen += selected_count;
    if (samples_seen >= total_samples) {
      samples_seen -= total_samples;
      ++epochs_done;
      return true;
    }
    return false;
  }
};

// Rolling check that every index was selected within the last `window`
// iterations; throws naming the violating window start.
struct CoverageWatch {
  std::size_t universe;
  std::size_t window;
  std::vector<std::size_t> last_seen;

  CoverageWatch(std::size_t u, std::size_t w)
      : universe(u), window(w), last_seen(u, static_cast<std::size_t>(-1)) {}

  void observe(const std::vector<std::size_t>& set, std::size_t iteration) {
    for (std::size_t k : set) last_seen[k] = iteration;
    if (iteration + 1 < window) return;
    const std::size_t window_start = iteration + 1 - window;
    for (std::size_t k = 0; k < universe; ++k) {
      if (last_seen[k] == static_cast<std::size_t>(-1) ||
          last_seen[k] < window_start) {
        throw std::runtime_error(
            "schedule violates coverage: index " + std::to_string(k) +
            " missing from the window starting at iteration " +
            std::to_string(window_start));
      }
    }
  }
};

}  // namespace

Tensor forward_step(const Tensor& theta, double gamma, const Sample& s,
                    const Activation& activation, bool allow_unsafe) {
  if (!allow_unsafe) {
    check_gamma(gamma, operator_norm_sq(s.op).norm_sq, false);
  } else if (!(gamma > 0.0)) {
    throw std::invalid_argument("step size gamma must be > 0");
  }
  Tensor z = s.op.apply(theta);
  activation.apply_inplace(z);
  sub_inplace(z, s.target);
  Tensor t = s.op.adjoint_apply(z);
  Tensor out = theta;
  add_scaled(out, -gamma, t);
  return out;
}

Trace run_alg1(const VIProblem& p, Schedule sched, const SolverOptions& opt,
               const Tensor& theta0, const std::vector<Tensor>* memories0,
               Alg1State* final_state) {
  const std::size_t K = p.num_samples();
  if (sched.universe() != K) {
    throw std::invalid_argument("run_alg1: schedule universe != sample count");
  }
  check_gamma(opt.gamma, p.max_norm_sq(), opt.allow_unsafe_gamma);
  require_shape(theta0, p.param_shape(), "run_alg1 theta0");
  if (memories0) {
    if (memories0->size() != K) {
      throw std::invalid_argument("run_alg1: need one initial memory per sample");
    }
    for (const Tensor& m : *memories0) {
      require_shape(m, p.param_shape(), "run_alg1 memories0");
    }
  }

  Trace trace;
  std::vector<Tensor> memories =
      memories0 ? *memories0 : std::vector<Tensor>(K, theta0);
  Tensor consensus(p.param_shape());
  {
    std::vector<std::size_t> all(K);
    for (std::size_t k = 0; k < K; ++k) all[k] = k;
    weighted_memory_sum(p, all, memories, consensus);
  }
  Tensor theta = theta0;
  Tensor block_sum(p.param_shape());
  Workspace ws{Tensor(), Tensor(p.param_shape())};
  trace.param_state_vectors = K + 2;   // memories, consensus, theta
  trace.param_scratch_vectors = 2;     // block_sum, adjoint scratch
  trace.codomain_scratch_vectors = 1;

  EpochMonitor monitor{p, opt.gamma, K, opt.record_wall_time};
  CoverageWatch watch(K, sched.window());
  monitor.record(trace, theta, 0);

  std::size_t n = 0;
  for (; n < opt.stop.max_iter; ++n) {
    const std::vector<std::size_t>& selected = sched.next();
    watch.observe(selected, n);

    block_sum.fill(0.0);
    weighted_memory_sum(p, selected, memories, block_sum);
    sub_inplace(consensus, block_sum);
    block_sum.fill(0.0);
    weighted_forward_sum(p, selected, theta, opt.gamma, block_sum, &memories, ws);
    add_inplace(consensus, block_sum);

    theta = consensus;
    p.constraint().project_inplace(theta);

    if (monitor.advance(selected.size())) {
      monitor.record(trace, theta, n + 1);
      if (opt.stop.residual_tol > 0.0 &&
          trace.records.back().nat_res <= opt.stop.residual_tol) {
        trace.converged = true;
        ++n;
        break;
      }
    }
  }
  if (monitor.last_recorded_iter != n) monitor.record(trace, theta, n);
  trace.total_iterations = n;
  if (final_state) {
    final_state->memories = memories;
    final_state->consensus = consensus;
    final_state->theta = theta;
    final_state->iteration = n;
  }
  trace.final_theta = std::move(theta);
  return trace;
}

Trace run_alg2(const VIProblem& p,
               const std::vector<std::vector<std::size_t>>& partition,
               Schedule sched, const SolverOptions& opt, const Tensor& theta0,
               const std::vector<Tensor>* aggregates0, Alg2State* final_state) {
  const std::size_t K = p.num_samples();
  const std::size_t J = partition.size();
  if (J == 0) throw std::invalid_argument("run_alg2: empty partition");
  {
    std::vector<bool> seen(K, false);
    std::size_t covered = 0;
    for (const auto& batch : partition) {
      if (batch.empty()) throw std::invalid_argument("run_alg2: empty batch");
      for (std::size_t k : batch) {
        if (k >= K || seen[k]) {
          throw std::invalid_argument(
              "run_alg2: batches must form a partition of the samples");
        }
        seen[k] = true;
        ++covered;
      }
    }
    if (covered != K) {
      throw std::invalid_argument(
          "run_alg2: batches must form a partition of the samples");
    }
  }
  if (sched.universe() != J) {
    throw std::invalid_argument("run_alg2: schedule universe != batch count");
  }
  check_gamma(opt.gamma, p.max_norm_sq(), opt.allow_unsafe_gamma);
  require_shape(theta0, p.param_shape(), "run_alg2 theta0");
  if (aggregates0 && aggregates0->size() != J) {
    throw std::invalid_argument("run_alg2: need one initial aggregate per batch");
  }

  Trace trace;
  std::vector<Tensor> aggregates;
  aggregates.reserve(J);
  if (aggregates0) {
    for (const Tensor& a : *aggregates0) {
      require_shape(a, p.param_shape(), "run_alg2 aggregates0");
      aggregates.push_back(a);
    }
  } else {
    // Default: a_j = sum_{k in K_j} w_k * theta0.
    for (std::size_t j = 0; j < J; ++j) {
      Tensor a(p.param_shape());
      for (std::size_t k : partition[j]) {
        const double w = p.sample(k).weight;
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += w * theta0[i];
      }
      aggregates.push_back(std::move(a));
    }
  }
  Tensor running_sum(p.param_shape());
  for (const Tensor& a : aggregates) add_inplace(running_sum, a);
  Tensor theta = theta0;
  Workspace ws{Tensor(), Tensor(p.param_shape())};
  trace.param_state_vectors = J + 2;  // aggregates, running sum, theta
  trace.param_scratch_vectors = 1;    // adjoint scratch
  trace.codomain_scratch_vectors = 1;

  EpochMonitor monitor{p, opt.gamma, K, opt.record_wall_time};
  CoverageWatch watch(J, sched.window());
  monitor.record(trace, theta, 0);

  std::size_t n = 0;
  for (; n < opt.stop.max_iter; ++n) {
    const std::vector<std::size_t>& selected = sched.next();
    if (selected.size() != 1) {
      throw std::invalid_argument(
          "run_alg2: the schedule must select exactly one batch per iteration");
    }
    watch.observe(selected, n);
    const std::size_t j = selected[0];

    sub_inplace(running_sum, aggregates[j]);
    aggregates[j].fill(0.0);
    weighted_forward_sum(p, partition[j], theta, opt.gamma, aggregates[j],
                         nullptr, ws);
    add_inplace(running_sum, aggregates[j]);

    theta = running_sum;
    p.constraint().project_inplace(theta);

    if (monitor.advance(partition[j].size())) {
      monitor.record(trace, theta, n + 1);
      if (opt.stop.residual_tol > 0.0 &&
          trace.records.back().nat_res <= opt.stop.residual_tol) {
        trace.converged = true;
        ++n;
        break;
      }
    }
  }
  if (monitor.last_recorded_iter != n) monitor.record(trace, theta, n);
  trace.total_iterations = n;
  if (final_state) {
    final_state->aggregates = aggregates;
    final_state->running_sum = running_sum;
    final_state->theta = theta;
    final_state->iteration = n;
  }
  trace.final_theta = std::move(theta);
  return trace;
}

namespace {

// Accumulates the subgradient of loss(R(L_k theta), y_k) into `grad` with
// the given scale. The codomain buffer receives L_k theta and is rewritten
// in place into loss'(R(z) - y) * R'(z).
void accumulate_sample_gradient(const VIProblem& p, std::size_t k,
                                const Tensor& theta, Loss loss, double scale,
                                Tensor& grad, Workspace& ws) {
  const Sample& s = p.sample(k);
  const Activation& act = p.activation();
  s.op.apply_into(theta, ws.z);
  for (std::size_t i = 0; i < ws.z.size(); ++i) {
    const double pre = ws.z[i];
    const double r = act(pre) - s.target[i];
    double dl;
    if (loss == Loss::l1) {
      dl = (r > 0.0) ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    } else {
      dl = 2.0 * r;
    }
    ws.z[i] = dl * act.derivative(pre);
  }
  s.op.adjoint_into(ws.z, ws.t);
  add_scaled(grad, scale, ws.t);
}

template <typename Update>
Trace run_baseline(const VIProblem& p, const BaselineOptions& opt,
                   const Tensor& theta0, Update&& update_theta) {
  const std::size_t K = p.num_samples();
  const bool fixed_batches = !opt.partition.empty();
  const std::size_t batch = (opt.batch == 0) ? K : opt.batch;
  if (!fixed_batches && (batch == 0 || K % batch != 0)) {
    throw std::invalid_argument("baseline: batch size must divide the sample count");
  }
  if (fixed_batches) {
    for (const auto& b : opt.partition) {
      if (b.empty()) throw std::invalid_argument("baseline: empty batch");
      for (std::size_t k : b) {
        if (k >= K) {
          throw std::invalid_argument("baseline: batch index out of range");
        }
      }
    }
  }
  if (!(opt.lr > 0.0)) throw std::invalid_argument("baseline: lr must be > 0");
  require_shape(theta0, p.param_shape(), "baseline theta0");

  Trace trace;
  Tensor theta = theta0;
  Tensor grad(p.param_shape());
  Workspace ws{Tensor(), Tensor(p.param_shape())};
  Rng rng(opt.seed);

  // Residuals are monitored with a fixed reference step 1/max||L||^2 so the
  // column is comparable across methods.
  const double gamma_ref =
      (p.max_norm_sq() > 0.0) ? 1.0 / p.max_norm_sq() : 1.0;
  EpochMonitor monitor{p, gamma_ref, K, opt.record_wall_time};
  monitor.record(trace, theta, 0);

  std::vector<std::size_t> order(fixed_batches ? opt.partition.size() : K);
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;

  auto batch_step = [&](const std::size_t* idx, std::size_t count,
                        std::size_t step) {
    grad.fill(0.0);
    const double scale = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      accumulate_sample_gradient(p, idx[i], theta, opt.loss, scale, grad, ws);
    }
    update_theta(theta, grad, step);
  };

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    if (fixed_batches) {
      for (std::size_t j : order) {
        const auto& b = opt.partition[j];
        batch_step(b.data(), b.size(), ++step);
      }
    } else {
      for (std::size_t b = 0; b < K; b += batch) {
        batch_step(order.data() + b, batch, ++step);
      }
    }
    monitor.advance(K);
    monitor.record(trace, theta, step);
  }
  trace.total_iterations = step;
  trace.final_theta = std::move(theta);
  return trace;
}

}  // namespace

Trace run_sgd(const VIProblem& p, const BaselineOptions& opt,
              const Tensor& theta0) {
  const double lr = opt.lr;
  return run_baseline(p, opt, theta0,
                      [lr](Tensor& theta, const Tensor& grad, std::size_t) {
                        add_scaled(theta, -lr, grad);
                      });
}

Trace run_adam(const VIProblem& p, const BaselineOptions& opt,
               const Tensor& theta0) {
  if (!(opt.beta1 >= 0.0 && opt.beta1 < 1.0 && opt.beta2 >= 0.0 &&
        opt.beta2 < 1.0)) {
    throw std::invalid_argument("adam: betas must lie in [0,1)");
  }
  if (!(opt.eps > 0.0)) throw std::invalid_argument("adam: eps must be > 0");
  Tensor m(p.param_shape());
  Tensor v(p.param_shape());
  const double lr = opt.lr, b1 = opt.beta1, b2 = opt.beta2, eps = opt.eps;
  return run_baseline(
      p, opt, theta0,
      [lr, b1, b2, eps, m, v](Tensor& theta, const Tensor& grad,
                              std::size_t step) mutable {
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
        for (std::size_t i = 0; i < theta.size(); ++i) {
          const double g = grad[i];
          m[i] = b1 * m[i] + (1.0 - b1) * g;
          v[i] = b2 * v[i] + (1.0 - b2) * g * g;
          const double mhat = m[i] / c1;
          const double vhat = v[i] / c2;
          theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
      });
}

}  // namespace vilt
