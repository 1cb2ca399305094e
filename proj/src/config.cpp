#include "vilt/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vilt/activations.hpp"
#include "vilt/constraints.hpp"

namespace vilt {

void ExperimentConfig::validate() const {
  if (patch_size == 0 || image_size % patch_size != 0) {
    throw std::invalid_argument("config: patch_size must divide image_size");
  }
  if (num_images == 0 || num_test_images == 0) {
    throw std::invalid_argument("config: need at least one image per split");
  }
  if (!(noise_std >= 0.0)) {
    throw std::invalid_argument("config: noise_std must be >= 0");
  }
  if (batch_size == 0 || num_images % batch_size != 0) {
    throw std::invalid_argument(
        "config: batch_size must divide num_images (same-position batching)");
  }
  if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) {
    throw std::invalid_argument("config: gamma_fraction must lie in (0,1)");
  }
  if (epochs == 0) throw std::invalid_argument("config: epochs must be >= 1");
  if (channels == 0 || frozen_kernel == 0 || kernel_h == 0 || kernel_w == 0) {
    throw std::invalid_argument("config: zero-sized layer geometry");
  }
  if (loss != "l1" && loss != "l2") {
    throw std::invalid_argument("config: loss must be l1 or l2");
  }
  if (!(lr_sgd > 0.0) || !(lr_adam > 0.0)) {
    throw std::invalid_argument("config: learning rates must be > 0");
  }
  for (const auto& m : methods) {
    if (m != "vi" && m != "sgd" && m != "adam") {
      throw std::invalid_argument("config: unknown method " + m);
    }
  }
  // Fail early on malformed specs rather than mid-pipeline.
  Activation::parse(activation);
  Activation::parse(frozen_activation);
  ConstraintSet::parse(constraint, Shape{channels, 1, kernel_h, kernel_w});
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed config " + path.string() + ": " + e.what());
  }

  ExperimentConfig c;
  auto get = [&doc](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("num_images", c.num_images);
  get("num_test_images", c.num_test_images);
  get("image_size", c.image_size);
  get("patch_size", c.patch_size);
  get("noise_std", c.noise_std);
  get("export_pgm", c.export_pgm);
  get("channels", c.channels);
  get("frozen_layers", c.frozen_layers);
  get("frozen_kernel", c.frozen_kernel);
  get("frozen_activation", c.frozen_activation);
  get("kernel_h", c.kernel_h);
  get("kernel_w", c.kernel_w);
  get("activation", c.activation);
  get("constraint", c.constraint);
  get("init_scale", c.init_scale);
  get("methods", c.methods);
  get("epochs", c.epochs);
  get("batch_size", c.batch_size);
  get("gamma_fraction", c.gamma_fraction);
  get("residual_tol", c.residual_tol);
  get("loss", c.loss);
  get("lr_sgd", c.lr_sgd);
  get("lr_adam", c.lr_adam);
  get("adam_beta1", c.adam_beta1);
  get("adam_beta2", c.adam_beta2);
  get("adam_eps", c.adam_eps);
  get("record_wall_time", c.record_wall_time);
  get("seed", c.seed);
  get("out_dir", c.out_dir);
  c.validate();
  return c;
}

}  // namespace vilt
