#pragma once

#include <filesystem>
#include <string>

#include "vilt/tensor.hpp"

namespace vilt {

// Tensor file format "VLT1": one ASCII header line
//   VLT1 <ndims> <d1> ... <dn>
// followed by the elements as little-endian 64-bit floats in row-major order.

void write_vlt1(const std::filesystem::path& path, const Tensor& t);
Tensor read_vlt1(const std::filesystem::path& path);

/// Writes `contents` to `path` via a temporary file and rename, so a crash
/// never leaves a truncated file behind.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace vilt
