#include "vilt/linops.hpp"

#include <cmath>
#include <stdexcept>

#include "vilt/rng.hpp"

namespace vilt {

namespace {

Shape image_shape(std::size_t channels, std::size_t n) {
  if (channels == 1) return Shape{n, n};
  return Shape{channels, n, n};
}

// out[n,p,q] = sum_{c,i,j} img[c, p+i-ph, q+j-pw] * ker[c,n,i,j]
// Zero padding; ph = (h-1)/2, pw = (w-1)/2 give "same" output size.
// Accumulation runs in (c,i,j) order per output pixel.
void conv_forward(const double* img, std::size_t cin, std::size_t n,
                  const double* ker, std::size_t cout, std::size_t h,
                  std::size_t w, double* out) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>((h - 1) / 2);
  const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>((w - 1) / 2);
  for (std::size_t oc = 0; oc < cout; ++oc) {
    for (std::ptrdiff_t p = 0; p < N; ++p) {
      for (std::ptrdiff_t q = 0; q < N; ++q) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cin; ++c) {
          const double* plane = img + c * n * n;
          const double* kc = ker + ((c * cout + oc) * h) * w;
          for (std::size_t i = 0; i < h; ++i) {
            const std::ptrdiff_t r = p + static_cast<std::ptrdiff_t>(i) - ph;
            if (r < 0 || r >= N) continue;
            for (std::size_t j = 0; j < w; ++j) {
              const std::ptrdiff_t s = q + static_cast<std::ptrdiff_t>(j) - pw;
              if (s < 0 || s >= N) continue;
              acc += plane[r * N + s] * kc[i * w + j];
            }
          }
        }
        out[(oc * n + static_cast<std::size_t>(p)) * n +
            static_cast<std::size_t>(q)] = acc;
      }
    }
  }
}

// Adjoint towards the kernel stack:
// out[c,n,i,j] = sum_{p,q} img[c, p+i-ph, q+j-pw] * v[n,p,q]
void conv_adjoint_kernel(const double* img, std::size_t cin, std::size_t n,
                         const double* v, std::size_t cout, std::size_t h,
                         std::size_t w, double* out) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>((h - 1) / 2);
  const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>((w - 1) / 2);
  for (std::size_t c = 0; c < cin; ++c) {
    const double* plane = img + c * n * n;
    for (std::size_t oc = 0; oc < cout; ++oc) {
      const double* vp = v + oc * n * n;
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          double acc = 0.0;
          for (std::ptrdiff_t p = 0; p < N; ++p) {
            const std::ptrdiff_t r = p + static_cast<std::ptrdiff_t>(i) - ph;
            if (r < 0 || r >= N) continue;
            for (std::ptrdiff_t q = 0; q < N; ++q) {
              const std::ptrdiff_t s = q + static_cast<std::ptrdiff_t>(j) - pw;
              if (s < 0 || s >= N) continue;
              acc += plane[r * N + s] * vp[p * N + q];
            }
          }
          out[((c * cout + oc) * h + i) * w + j] = acc;
        }
      }
    }
  }
}

// Adjoint towards the image:
// out[c,a,b] = sum_{n,i,j} ker[c,n,i,j] * v[n, a-i+ph, b-j+pw]
void conv_adjoint_image(const double* ker, std::size_t cin, std::size_t cout,
                        std::size_t h, std::size_t w, std::size_t n,
                        const double* v, double* out) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>((h - 1) / 2);
  const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>((w - 1) / 2);
  for (std::size_t c = 0; c < cin; ++c) {
    for (std::ptrdiff_t a = 0; a < N; ++a) {
      for (std::ptrdiff_t b = 0; b < N; ++b) {
        double acc = 0.0;
        for (std::size_t oc = 0; oc < cout; ++oc) {
          const double* vp = v + oc * n * n;
          const double* kc = ker + ((c * cout + oc) * h) * w;
          for (std::size_t i = 0; i < h; ++i) {
            const std::ptrdiff_t p = a - static_cast<std::ptrdiff_t>(i) + ph;
            if (p < 0 || p >= N) continue;
            for (std::size_t j = 0; j < w; ++j) {
              const std::ptrdiff_t q = b - static_cast<std::ptrdiff_t>(j) + pw;
              if (q < 0 || q >= N) continue;
              acc += kc[i * w + j] * vp[p * N + q];
            }
          }
        }
        out[(c * n + static_cast<std::size_t>(a)) * n +
            static_cast<std::size_t>(b)] = acc;
      }
    }
  }
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

}  // namespace

LinearOperator LinearOperator::dense(Shape domain, Shape codomain,
                                     std::vector<double> matrix) {
  if (matrix.size() != domain.numel() * codomain.numel()) {
    throw std::invalid_argument("dense operator: matrix size " +
                                std::to_string(matrix.size()) +
                                " != " + codomain.str() + " x " + domain.str());
  }
  LinearOperator op;
  op.kind_ = OpKind::dense;
  op.domain_ = domain;
  op.core_domain_ = std::move(domain);
  op.codomain_ = std::move(codomain);
  op.payload_ = DensePayload{std::move(matrix)};
  return op;
}

LinearOperator LinearOperator::conv_features(Tensor features,
                                             Shape kernel_shape) {
  Tensor feat = std::move(features);
  if (feat.shape().rank() == 2) {
    if (feat.shape()[0] != feat.shape()[1]) {
      throw std::invalid_argument("conv features: image must be square");
    }
    feat = feat.reshaped(Shape{1, feat.shape()[0], feat.shape()[1]});
  }
  if (feat.shape().rank() != 3 || feat.shape()[1] != feat.shape()[2]) {
    throw std::invalid_argument("conv features: expected [C,N,N], got " +
                                feat.shape().str());
  }
  if (kernel_shape.rank() != 4) {
    throw std::invalid_argument("conv kernel shape: expected [Cin,Cout,h,w]");
  }
  if (kernel_shape[0] != feat.shape()[0]) {
    throw std::invalid_argument("conv: kernel input channels " +
                                std::to_string(kernel_shape[0]) +
                                " != feature channels " +
                                std::to_string(feat.shape()[0]));
  }
  ConvPayload pl{std::move(feat), kernel_shape[0], kernel_shape[1],
                 kernel_shape[2], kernel_shape[3], 0, true};
  pl.n = pl.fixed.shape()[1];
  LinearOperator op;
  op.kind_ = OpKind::conv2d;
  op.domain_ = kernel_shape;
  op.core_domain_ = std::move(kernel_shape);
  op.codomain_ = image_shape(pl.cout, pl.n);
  op.payload_ = std::move(pl);
  return op;
}

LinearOperator LinearOperator::conv_kernel(Tensor kernels,
                                           std::size_t image_n) {
  if (kernels.shape().rank() != 4) {
    throw std::invalid_argument("conv kernels: expected [Cin,Cout,h,w], got " +
                                kernels.shape().str());
  }
  if (image_n == 0) throw std::invalid_argument("conv: empty image");
  ConvPayload pl{std::move(kernels), 0, 0, 0, 0, image_n, false};
  pl.cin = pl.fixed.shape()[0];
  pl.cout = pl.fixed.shape()[1];
  pl.h = pl.fixed.shape()[2];
  pl.w = pl.fixed.shape()[3];
  LinearOperator op;
  op.kind_ = OpKind::conv2d;
  op.domain_ = image_shape(pl.cin, image_n);
  op.core_domain_ = op.domain_;
  op.codomain_ = image_shape(pl.cout, image_n);
  op.payload_ = std::move(pl);
  return op;
}

LinearOperator LinearOperator::with_bias(LinearOperator inner) {
  if (inner.bias_) {
    throw std::invalid_argument("with_bias: operator already augmented");
  }
  LinearOperator op = std::move(inner);
  op.bias_ = true;
  op.domain_ = Shape{op.core_domain_.numel() + op.codomain_.numel()};
  return op;
}

bool LinearOperator::is_zero() const {
  if (bias_) return false;
  if (const auto* d = std::get_if<DensePayload>(&payload_)) {
    return all_zero(d->m);
  }
  return all_zero(std::get<ConvPayload>(payload_).fixed.values());
}

void LinearOperator::apply_into(const Tensor& u, Tensor& out) const {
  require_shape(u, domain_, "apply");
  if (!(out.shape() == codomain_)) out = Tensor(codomain_);
  const double* in = u.data();
  if (const auto* d = std::get_if<DensePayload>(&payload_)) {
    const std::size_t rows = codomain_.numel();
    const std::size_t cols = core_domain_.numel();
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      const double* row = d->m.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) acc += row[c] * in[c];
      out[r] = acc;
    }
  } else {
    const auto& cv = std::get<ConvPayload>(payload_);
    if (cv.input_is_kernel) {
      conv_forward(cv.fixed.data(), cv.cin, cv.n, in, cv.cout, cv.h, cv.w,
                   out.data());
    } else {
      conv_forward(in, cv.cin, cv.n, cv.fixed.data(), cv.cout, cv.h, cv.w,
                   out.data());
    }
  }
  if (bias_) {
    const double* b = u.data() + core_domain_.numel();
    for (std::size_t i = 0; i < codomain_.numel(); ++i) out[i] += b[i];
  }
}

void LinearOperator::adjoint_into(const Tensor& v, Tensor& out) const {
  require_shape(v, codomain_, "adjoint_apply");
  if (!(out.shape() == domain_)) out = Tensor(domain_);
  if (const auto* d = std::get_if<DensePayload>(&payload_)) {
    const std::size_t rows = codomain_.numel();
    const std::size_t cols = core_domain_.numel();
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t r = 0; r < rows; ++r) acc += d->m[r * cols + c] * v[r];
      out[c] = acc;
    }
  } else {
    const auto& cv = std::get<ConvPayload>(payload_);
    if (cv.input_is_kernel) {
      conv_adjoint_kernel(cv.fixed.data(), cv.cin, cv.n, v.data(), cv.cout,
                          cv.h, cv.w, out.data());
    } else {
      conv_adjoint_image(cv.fixed.data(), cv.cin, cv.cout, cv.h, cv.w, cv.n,
                         v.data(), out.data());
    }
  }
  if (bias_) {
    double* b = out.data() + core_domain_.numel();
    for (std::size_t i = 0; i < codomain_.numel(); ++i) b[i] = v[i];
  }
}

Tensor LinearOperator::apply(const Tensor& u) const {
  Tensor out(codomain_);
  apply_into(u, out);
  return out;
}

Tensor LinearOperator::adjoint_apply(const Tensor& v) const {
  Tensor out(domain_);
  adjoint_into(v, out);
  return out;
}

NormEstimate operator_norm_sq(const LinearOperator& op, double tol,
                              int max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("operator_norm_sq: tol <= 0");
  if (op.is_zero()) return NormEstimate{0.0, 0, 0.0};

  // Deterministic start so downstream step sizes are reproducible.
  Rng rng(0xC0FFEE);
  Tensor u(op.domain_shape());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.normal();
  double un = norm_l2(u);
  if (un == 0.0) return NormEstimate{0.0, 0, 0.0};
  scale_inplace(u, 1.0 / un);

  Tensor v(op.codomain_shape());
  Tensor t(op.domain_shape());
  NormEstimate est;
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    op.apply_into(u, v);
    op.adjoint_into(v, t);  // t = L*L u
    const double lambda = dot(u, t);
    est.norm_sq = lambda;
    est.iterations = it;
    est.residual = std::abs(lambda - lambda_prev) / std::max(1.0, std::abs(lambda));
    if (it > 1 && est.residual < tol) return est;
    const double tn = norm_l2(t);
    if (tn == 0.0) {
      est.norm_sq = 0.0;
      est.residual = 0.0;
      return est;
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = t[i] / tn;
    lambda_prev = lambda;
  }
  return est;
}

}  // namespace vilt
