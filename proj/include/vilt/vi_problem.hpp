#pragma once

#include <filesystem>
#include <vector>

#include "vilt/activations.hpp"
#include "vilt/constraints.hpp"
#include "vilt/linops.hpp"
#include "vilt/tensor.hpp"

namespace vilt {

/// One training pair: the linear map L_k, its target y_k and weight w_k.
struct Sample {
  LinearOperator op;
  Tensor target;
  double weight = 0.0;
};

/// The equilibrium problem over parameters theta in C:
///   find theta in C with <v - theta, F(theta)> >= 0 for all v in C,
/// where F(theta) = sum_k w_k L_k*(R(L_k theta) - y_k).
///
/// Immutable after construction; per-operator norm bounds are computed once
/// so every solver sees the same step-size limit.
class VIProblem {
 public:
  VIProblem(std::vector<Sample> samples, Activation activation,
            ConstraintSet constraint, Shape param_shape);

  std::size_t num_samples() const { return samples_.size(); }
  const Sample& sample(std::size_t k) const { return samples_[k]; }
  const Activation& activation() const { return activation_; }
  const ConstraintSet& constraint() const { return constraint_; }
  const Shape& param_shape() const { return param_shape_; }
  const Shape& codomain_shape(std::size_t k) const {
    return samples_[k].op.codomain_shape();
  }

  /// F(theta), accumulated in sample-index order.
  Tensor residual_map(const Tensor& theta) const;

  /// 2 / max_k ||L_k||^2. Throws on an all-zero operator family.
  double max_step_size() const;

  /// max_k ||L_k||^2 from the cached power-iteration estimates.
  double max_norm_sq() const { return max_norm_sq_; }

  /// || theta - proj_C(theta - gamma F(theta)) ||; zero exactly at solutions.
  double natural_residual(const Tensor& theta, double gamma) const;

  /// (1/K) sum_k ||R(L_k theta) - y_k||_p^p for p in {1,2}.
  double training_error(const Tensor& theta, int ord) const;

 private:
  std::vector<Sample> samples_;
  Activation activation_;
  ConstraintSet constraint_;
  Shape param_shape_;
  double max_norm_sq_ = 0.0;
};

/// Problem manifest: JSON listing per-sample VLT1 feature/target files plus
/// activation, constraint and weights. Feature tensors are turned into
/// conv2d operators with the given kernel shape.
VIProblem load_problem_manifest(const std::filesystem::path& manifest_path);
void write_problem_manifest(const std::filesystem::path& manifest_path,
                            const std::vector<std::string>& feature_files,
                            const std::vector<std::string>& target_files,
                            const std::vector<double>& weights,
                            const Shape& kernel_shape,
                            const std::string& activation_spec,
                            const std::string& constraint_spec);

}  // namespace vilt
