#pragma once

#include <cstdint>
#include <string_view>

#include "vilt/tensor.hpp"

namespace vilt {

/// Componentwise activation operator R. All supported kinds are firmly
/// nonexpansive: <z1-z2, Rz1-Rz2> >= ||Rz1-Rz2||^2. LeakyReLU slopes are
/// restricted to [0,1]; anything else is rejected at construction because
/// the solver's convergence guarantee rests on this inequality.
class Activation {
 public:
  enum class Kind { identity, relu, leaky_relu };

  static Activation identity() { return Activation(Kind::identity, 1.0); }
  static Activation relu() { return Activation(Kind::relu, 0.0); }
  static Activation leaky_relu(double slope);

  /// Parses "identity", "relu", "leaky_relu:<slope>".
  static Activation parse(std::string_view spec);

  double operator()(double z) const {
    if (kind_ == Kind::identity) return z;
    return z >= 0.0 ? z : slope_ * z;
  }

  void apply_inplace(Tensor& z) const;
  Tensor apply(const Tensor& z) const;

  /// Subgradient used by the minimization baselines: 1 for z >= 0 (including
  /// exactly 0), the negative slope otherwise.
  double derivative(double z) const {
    if (kind_ == Kind::identity) return 1.0;
    return z >= 0.0 ? 1.0 : slope_;
  }

  Kind kind() const { return kind_; }
  double slope() const { return slope_; }
  std::string spec() const;

  bool operator==(const Activation&) const = default;

 private:
  Activation(Kind k, double s) : kind_(k), slope_(s) {}
  Kind kind_;
  double slope_;
};

struct FirmlyNonexpansiveReport {
  long violations = 0;       // margins below -1e-12
  double worst_margin = 0.0; // min over trials of <d, Rd'> - ||Rd'||^2
};

/// Samples `trials` random pairs (z1, z2) of dimension `dim` and evaluates
/// the firm-nonexpansiveness margin for each.
FirmlyNonexpansiveReport check_firm_nonexpansive(const Activation& act,
                                                 int trials, int dim,
                                                 std::uint64_t seed);

}  // namespace vilt
