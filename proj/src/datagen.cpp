#include "vilt/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vilt/rng.hpp"
#include "vilt/vlt_io.hpp"

namespace vilt {

Tensor synth_image(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("synth_image: empty image");
  Rng rng(seed);
  Tensor img(Shape{n, n});
  const double nn = static_cast<double>(n);

  const int modes = 3 + static_cast<int>(rng.below(3));
  for (int m = 0; m < modes; ++m) {
    const double fx = rng.uniform(0.5, 3.0);
    const double fy = rng.uniform(0.5, 3.0);
    const double phase = rng.uniform(0.0, 6.283185307179586);
    const double amp = rng.uniform(0.3, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        img[p * n + q] += amp * std::cos(6.283185307179586 *
                                             (fx * p + fy * q) / nn +
                                         phase);
      }
    }
  }
  const int bumps = 2 + static_cast<int>(rng.below(3));
  for (int b = 0; b < bumps; ++b) {
    const double cx = rng.uniform(0.0, nn);
    const double cy = rng.uniform(0.0, nn);
    const double rad = rng.uniform(nn / 10.0, nn / 3.0);
    const double amp = rng.uniform(-1.0, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        const double dx = (p - cx) / rad, dy = (q - cy) / rad;
        img[p * n + q] += amp * std::exp(-(dx * dx + dy * dy));
      }
    }
  }

  double lo = img[0], hi = img[0];
  for (std::size_t i = 0; i < img.size(); ++i) {
    lo = std::min(lo, img[i]);
    hi = std::max(hi, img[i]);
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = (range > 0.0) ? (img[i] - lo) / range : 0.5;
  }
  return img;
}

std::vector<Tensor> split_patches(const Tensor& image, std::size_t patch) {
  if (image.shape().rank() != 2 || image.shape()[0] != image.shape()[1]) {
    throw std::invalid_argument("split_patches: expected a square image");
  }
  const std::size_t n = image.shape()[0];
  if (patch == 0 || n % patch != 0) {
    throw std::invalid_argument("split_patches: patch size must divide the image size");
  }
  const std::size_t grid = n / patch;
  std::vector<Tensor> out;
  out.reserve(grid * grid);
  for (std::size_t gp = 0; gp < grid; ++gp) {
    for (std::size_t gq = 0; gq < grid; ++gq) {
      Tensor t(Shape{patch, patch});
      for (std::size_t i = 0; i < patch; ++i) {
        for (std::size_t j = 0; j < patch; ++j) {
          t[i * patch + j] = image[(gp * patch + i) * n + (gq * patch + j)];
        }
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

Tensor reassemble_patches(const std::vector<Tensor>& patches,
                          std::size_t image_n) {
  if (patches.empty()) throw std::invalid_argument("reassemble: no patches");
  const std::size_t patch = patches[0].shape()[0];
  if (patch == 0 || image_n % patch != 0) {
    throw std::invalid_argument("reassemble: patch size must divide the image size");
  }
  const std::size_t grid = image_n / patch;
  if (patches.size() != grid * grid) {
    throw std::invalid_argument("reassemble: wrong patch count");
  }
  Tensor img(Shape{image_n, image_n});
  for (std::size_t gp = 0; gp < grid; ++gp) {
    for (std::size_t gq = 0; gq < grid; ++gq) {
      const Tensor& t = patches[gp * grid + gq];
      require_shape(t, Shape{patch, patch}, "reassemble");
      for (std::size_t i = 0; i < patch; ++i) {
        for (std::size_t j = 0; j < patch; ++j) {
          img[(gp * patch + i) * image_n + (gq * patch + j)] = t[i * patch + j];
        }
      }
    }
  }
  return img;
}

void normalize_group(std::vector<Tensor*>& group) {
  if (group.empty()) return;
  double lo = (*group[0])[0], hi = lo;
  for (Tensor* t : group) {
    for (std::size_t i = 0; i < t->size(); ++i) {
      lo = std::min(lo, (*t)[i]);
      hi = std::max(hi, (*t)[i]);
    }
  }
  const double range = hi - lo;
  for (Tensor* t : group) {
    for (std::size_t i = 0; i < t->size(); ++i) {
      (*t)[i] = (range > 0.0) ? ((*t)[i] - lo) / range : 0.5;
    }
  }
}

void write_pgm(const std::filesystem::path& path, const Tensor& image) {
  if (image.shape().rank() != 2) {
    throw std::invalid_argument("pgm: expected a 2-D image");
  }
  const std::size_t rows = image.shape()[0], cols = image.shape()[1];
  std::string blob = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  blob.reserve(blob.size() + image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = std::clamp(image[i], 0.0, 1.0);
    blob.push_back(static_cast<char>(static_cast<unsigned char>(
        std::lround(v * 255.0))));
  }
  atomic_write(path, blob);
}

}  // namespace vilt
