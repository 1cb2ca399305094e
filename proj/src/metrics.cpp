#include "vilt/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vilt/rng.hpp"

namespace vilt {

Tensor add_gaussian_noise(const Tensor& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise: sigma must be >= 0");
  Tensor out = image;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += sigma * rng.normal();
  return out;
}

double psnr(const Tensor& reference, const Tensor& candidate, double peak) {
  if (!(reference.shape() == candidate.shape())) {
    throw std::invalid_argument("psnr: shape mismatch");
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - candidate[i];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {
constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

// Normalized 11x11 Gaussian window.
std::vector<double> make_window() {
  std::vector<double> w(kWindow * kWindow);
  const int half = kWindow / 2;
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    for (int j = 0; j < kWindow; ++j) {
      const double di = i - half, dj = j - half;
      const double v =
          std::exp(-(di * di + dj * dj) / (2.0 * kWindowSigma * kWindowSigma));
      w[i * kWindow + j] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;
  return w;
}
}  // namespace

double ssim(const Tensor& reference, const Tensor& candidate) {
  if (!(reference.shape() == candidate.shape())) {
    throw std::invalid_argument("ssim: shape mismatch");
  }
  if (reference.shape().rank() != 2) {
    throw std::invalid_argument("ssim: expected 2-D grayscale images");
  }
  const std::size_t rows = reference.shape()[0];
  const std::size_t cols = reference.shape()[1];
  if (rows < kWindow || cols < kWindow) {
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  }
  static const std::vector<double> window = make_window();

  const double* x = reference.data();
  const double* y = candidate.data();
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p + kWindow <= rows; ++p) {
    for (std::size_t q = 0; q + kWindow <= cols; ++q) {
      double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
      for (int i = 0; i < kWindow; ++i) {
        const double* xr = x + (p + i) * cols + q;
        const double* yr = y + (p + i) * cols + q;
        const double* wr = window.data() + i * kWindow;
        for (int j = 0; j < kWindow; ++j) {
          const double a = xr[j], b = yr[j], w = wr[j];
          mx += w * a;
          my += w * b;
          mxx += w * a * a;
          myy += w * b * b;
          mxy += w * a * b;
        }
      }
      const double vx = mxx - mx * mx;
      const double vy = myy - my * my;
      const double cxy = mxy - mx * my;
      const double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
      const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace vilt
