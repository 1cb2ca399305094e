#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vilt {

/// Experiment configuration, loaded from a single JSON document. Every field
/// has a desk-scale default so a minimal config file is `{}`.
struct ExperimentConfig {
  // dataset
  std::size_t num_images = 12;       // training images
  std::size_t num_test_images = 12;  // held-out images
  std::size_t image_size = 32;       // square images, split into patches
  std::size_t patch_size = 16;
  double noise_std = 0.07;
  bool export_pgm = false;

  // frozen feature stack
  std::size_t channels = 8;
  std::size_t frozen_layers = 3;
  std::size_t frozen_kernel = 3;
  std::string frozen_activation = "leaky_relu:0.01";

  // trainable last layer
  std::size_t kernel_h = 5;
  std::size_t kernel_w = 5;
  std::string activation = "leaky_relu:0.001";
  std::string constraint = "none";
  double init_scale = 0.05;  // std of the seeded last-layer init

  // training
  std::vector<std::string> methods = {"vi", "sgd", "adam"};
  std::size_t epochs = 200;
  std::size_t batch_size = 12;  // patches per batch, same position
  double gamma_fraction = 0.95; // gamma = fraction * 2/max||L||^2
  double residual_tol = 0.0;    // 0: run the full epoch budget
  std::string loss = "l1";
  double lr_sgd = 0.05;
  double lr_adam = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool record_wall_time = false;

  std::uint64_t seed = 1234;
  std::string out_dir = "out";

  /// Derived: patch positions per image.
  std::size_t positions() const {
    const std::size_t g = image_size / patch_size;
    return g * g;
  }
  /// Derived: training sample count K.
  std::size_t num_train_patches() const { return num_images * positions(); }

  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace vilt
