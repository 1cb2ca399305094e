#pragma once

#include <optional>
#include <string_view>

#include "vilt/tensor.hpp"

namespace vilt {

/// Closed convex set C with its exact Euclidean projection. The default for
/// the denoising experiment is the whole space (projection = identity).
class ConstraintSet {
 public:
  enum class Kind { whole_space, box, ball, nonneg };

  static ConstraintSet whole_space() { return ConstraintSet(Kind::whole_space); }
  static ConstraintSet box(double lo, double hi);
  static ConstraintSet ball(Tensor center, double radius);
  static ConstraintSet nonneg() { return ConstraintSet(Kind::nonneg); }

  /// Parses "none", "box:<lo>:<hi>", "ball:<center>:<radius>" (constant
  /// center broadcast over `param_shape`), "nonneg".
  static ConstraintSet parse(std::string_view spec, const Shape& param_shape);

  void project_inplace(Tensor& theta) const;
  Tensor project(const Tensor& theta) const;

  Kind kind() const { return kind_; }

 private:
  explicit ConstraintSet(Kind k) : kind_(k) {}

  Kind kind_;
  double lo_ = 0.0, hi_ = 0.0;
  double radius_ = 0.0;
  std::optional<Tensor> center_;
};

}  // namespace vilt
