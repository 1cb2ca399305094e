#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vilt/tensor.hpp"

namespace vilt {

/// Smooth synthetic grayscale image in [0,1]: a seeded sum of random cosine
/// modes and Gaussian bumps, min-max normalized.
Tensor synth_image(std::size_t n, std::uint64_t seed);

/// Splits an n x n image into non-overlapping p x p patches, row-major over
/// patch positions. p must divide n.
std::vector<Tensor> split_patches(const Tensor& image, std::size_t patch);

/// Inverse of split_patches.
Tensor reassemble_patches(const std::vector<Tensor>& patches,
                          std::size_t image_n);

/// Jointly min-max normalizes a group of patches to [0,1] (in place).
/// A constant group maps to 0.5.
void normalize_group(std::vector<Tensor*>& group);

/// 8-bit binary PGM export, values clipped to [0,1]. Inspection only.
void write_pgm(const std::filesystem::path& path, const Tensor& image);

}  // namespace vilt
