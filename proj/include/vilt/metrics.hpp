#pragma once

#include <cstdint>

#include "vilt/tensor.hpp"

namespace vilt {

/// Adds i.i.d. N(0, sigma^2) noise from a seeded generator. Values are not
/// clipped to [0,1], so the expected MSE against the clean image is exactly
/// sigma^2.
Tensor add_gaussian_noise(const Tensor& image, double sigma, std::uint64_t seed);

/// 10*log10(peak^2 / MSE) in dB; +infinity for identical inputs.
double psnr(const Tensor& reference, const Tensor& candidate, double peak = 1.0);

/// Mean local SSIM over all fully interior windows, with an 11x11 Gaussian
/// window (sigma 1.5), C1 = (0.01)^2, C2 = (0.03)^2 and dynamic range 1.
/// Both images must be 2-D, square, and at least as large as the window.
double ssim(const Tensor& reference, const Tensor& candidate);

}  // namespace vilt
