#pragma once

#include <cstddef>
#include <variant>

#include "vilt/tensor.hpp"

namespace vilt {

enum class OpKind { dense, conv2d };

/// Result of the power-iteration estimate of ||L||^2.
struct NormEstimate {
  double norm_sq = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// A linear map with an exact adjoint. Two payloads:
///   dense         - explicit row-major matrix, |codomain| x |domain|
///   conv2d        - multi-channel 2-D correlation with zero padding and
///                   "same" output size; either the feature stack is fixed
///                   (input = kernel stack) or the kernel stack is fixed
///                   (input = image).
/// Operators are immutable after construction and safe to share.
class LinearOperator {
 public:
  /// Dense matrix operator; `matrix` is row-major with codomain.numel() rows.
  static LinearOperator dense(Shape domain, Shape codomain,
                              std::vector<double> matrix);

  /// Fixed feature stack [C_in,N,N] (or [N,N] for one channel), input is a
  /// kernel stack of shape [C_in,C_out,h,w]; output is the image stack
  /// [C_out,N,N] ([N,N] when C_out = 1).
  static LinearOperator conv_features(Tensor features, Shape kernel_shape);

  /// Fixed kernel stack [C_in,C_out,h,w] applied to N x N images; input
  /// shape [C_in,N,N] ([N,N] when C_in = 1), output [C_out,N,N] ([N,N]
  /// when C_out = 1).
  static LinearOperator conv_kernel(Tensor kernels, std::size_t image_n);

  /// Augments `inner` with an additive learnable bias: the domain becomes
  /// the flat vector (w-part, b-part) and L(w,b) = inner(w) + b. The
  /// adjoint accumulates the codomain vector into the b-part.
  static LinearOperator with_bias(LinearOperator inner);

  Tensor apply(const Tensor& u) const;
  Tensor adjoint_apply(const Tensor& v) const;
  void apply_into(const Tensor& u, Tensor& out) const;
  void adjoint_into(const Tensor& v, Tensor& out) const;

  OpKind kind() const { return kind_; }
  bool has_bias() const { return bias_; }
  const Shape& domain_shape() const { return domain_; }
  const Shape& codomain_shape() const { return codomain_; }

  /// True when every payload coefficient is zero (an augmented operator is
  /// never zero: it contains the identity on its bias part).
  bool is_zero() const;

 private:
  struct DensePayload {
    std::vector<double> m;
  };
  struct ConvPayload {
    Tensor fixed;  // features [C_in,N,N] or kernels [C_in,C_out,h,w]
    std::size_t cin, cout, h, w, n;
    bool input_is_kernel;  // true: fixed = features; false: fixed = kernels
  };

  LinearOperator() = default;

  OpKind kind_ = OpKind::dense;
  bool bias_ = false;
  Shape domain_;       // full input shape (flat when bias-augmented)
  Shape core_domain_;  // input shape of the un-augmented map
  Shape codomain_;
  std::variant<DensePayload, ConvPayload> payload_;
};

/// Power iteration on L*L from a deterministically seeded start vector.
/// Stops once successive Rayleigh quotients differ by less than
/// tol * max(1, |quotient|) or after max_iter rounds. A zero operator is
/// detected from the payload and reported without iterating.
NormEstimate operator_norm_sq(const LinearOperator& op, double tol = 1e-9,
                              int max_iter = 10000);

}  // namespace vilt
