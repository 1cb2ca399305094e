#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "vilt/activations.hpp"
#include "vilt/linops.hpp"

namespace vilt {

/// One frozen layer x -> R(Wx + b). Parameters are fixed after load.
struct Layer {
  LinearOperator weight;
  std::optional<Tensor> bias;  // codomain-shaped; empty means zero
  Activation activation = Activation::identity();

  Tensor forward(const Tensor& x) const;
};

/// Fixed composition of layers used to turn raw inputs into the feature
/// tensors the last trainable layer consumes. The shape chain is validated
/// at construction; an empty network is the identity.
class FrozenNetwork {
 public:
  FrozenNetwork() = default;
  explicit FrozenNetwork(std::vector<Layer> layers);

  Tensor forward(const Tensor& x) const;
  std::vector<Tensor> extract_features(const std::vector<Tensor>& inputs) const;

  std::size_t num_layers() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_[i]; }

 private:
  std::vector<Layer> layers_;
};

/// Network manifest: JSON with an ordered layer list
///   {"layers":[{"weight":"w0.vlt","bias":"zero","activation":"leaky_relu:0.01",
///               "image_size":16}, ...]}
/// Weight files hold conv kernel stacks [C_in,C_out,h,w].
FrozenNetwork load_network_manifest(const std::filesystem::path& path);

/// Generates a stack of convolutional layers with seeded Gaussian kernels,
/// each rescaled by power iteration so the layer's operator norm is about
/// `target_norm`. Kernels are written as VLT1 files next to the manifest.
void write_pseudo_pretrained_network(const std::filesystem::path& manifest_path,
                                     std::size_t num_layers,
                                     std::size_t channels,
                                     std::size_t kernel_size,
                                     std::size_t image_size,
                                     const Activation& activation,
                                     std::uint64_t seed,
                                     double target_norm = 1.0);

}  // namespace vilt
