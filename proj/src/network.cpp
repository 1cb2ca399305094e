#include "vilt/network.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vilt/rng.hpp"
#include "vilt/vlt_io.hpp"

namespace vilt {

Tensor Layer::forward(const Tensor& x) const {
  Tensor z = weight.apply(x);
  if (bias) add_inplace(z, *bias);
  activation.apply_inplace(z);
  return z;
}

FrozenNetwork::FrozenNetwork(std::vector<Layer> layers)
    : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].bias &&
        !(layers_[i].bias->shape() == layers_[i].weight.codomain_shape())) {
      throw std::invalid_argument("network: bias shape of layer " +
                                  std::to_string(i) +
                                  " does not match the layer output");
    }
    if (i + 1 < layers_.size() &&
        !(layers_[i].weight.codomain_shape() ==
          layers_[i + 1].weight.domain_shape())) {
      throw std::invalid_argument(
          "network: output shape " + layers_[i].weight.codomain_shape().str() +
          " of layer " + std::to_string(i) + " does not chain into layer " +
          std::to_string(i + 1) + " (" +
          layers_[i + 1].weight.domain_shape().str() + ")");
    }
  }
}

Tensor FrozenNetwork::forward(const Tensor& x) const {
  if (layers_.empty()) return x;
  require_shape(x, layers_.front().weight.domain_shape(), "network forward");
  Tensor z = layers_.front().forward(x);
  for (std::size_t i = 1; i < layers_.size(); ++i) z = layers_[i].forward(z);
  return z;
}

std::vector<Tensor> FrozenNetwork::extract_features(
    const std::vector<Tensor>& inputs) const {
  std::vector<Tensor> out;
  out.reserve(inputs.size());
  for (const Tensor& x : inputs) out.push_back(forward(x));
  return out;
}

FrozenNetwork load_network_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network manifest: " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in);
  const auto dir = path.parent_path();

  std::vector<Layer> layers;
  for (const auto& entry : doc.at("layers")) {
    Tensor kernels = read_vlt1(dir / entry.at("weight").get<std::string>());
    const auto image_size = entry.at("image_size").get<std::size_t>();
    Layer layer{LinearOperator::conv_kernel(std::move(kernels), image_size),
                std::nullopt,
                Activation::parse(entry.at("activation").get<std::string>())};
    const std::string bias_spec = entry.at("bias").get<std::string>();
    if (bias_spec != "zero") {
      layer.bias = read_vlt1(dir / bias_spec);
    }
    layers.push_back(std::move(layer));
  }
  return FrozenNetwork(std::move(layers));
}

void write_pseudo_pretrained_network(const std::filesystem::path& manifest_path,
                                     std::size_t num_layers,
                                     std::size_t channels,
                                     std::size_t kernel_size,
                                     std::size_t image_size,
                                     const Activation& activation,
                                     std::uint64_t seed,
                                     double target_norm) {
  if (num_layers == 0) throw std::invalid_argument("network: need >= 1 layer");
  const auto dir = manifest_path.parent_path();
  Rng rng(seed);

  nlohmann::json doc;
  auto& arr = doc["layers"] = nlohmann::json::array();
  for (std::size_t m = 0; m < num_layers; ++m) {
    const std::size_t cin = (m == 0) ? 1 : channels;
    const std::size_t cout = channels;
    Tensor kernels(Shape{cin, cout, kernel_size, kernel_size});
    const double scale =
        1.0 / std::sqrt(static_cast<double>(cin * kernel_size * kernel_size));
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      kernels[i] = scale * rng.normal();
    }
    // Rescale so ||W|| is about target_norm; keeps deep feature stacks
    // well conditioned. A loose tolerance is plenty here and avoids long
    // power-iteration tails on near-degenerate conv spectra.
    const auto probe = LinearOperator::conv_kernel(kernels, image_size);
    const double norm = std::sqrt(operator_norm_sq(probe, 1e-5, 1500).norm_sq);
    if (norm > 0.0) scale_inplace(kernels, target_norm / norm);

    const std::string file = "layer" + std::to_string(m) + ".vlt";
    write_vlt1(dir / file, kernels);
    arr.push_back({{"weight", file},
                   {"bias", "zero"},
                   {"activation", activation.spec()},
                   {"image_size", image_size}});
  }
  atomic_write(manifest_path, doc.dump(2) + "\n");
}

}  // namespace vilt
