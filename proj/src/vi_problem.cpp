#include "vilt/vi_problem.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vilt/vlt_io.hpp"

namespace vilt {

VIProblem::VIProblem(std::vector<Sample> samples, Activation activation,
                     ConstraintSet constraint, Shape param_shape)
    : samples_(std::move(samples)),
      activation_(activation),
      constraint_(std::move(constraint)),
      param_shape_(std::move(param_shape)) {
  if (samples_.empty()) throw std::invalid_argument("VIProblem: no samples");
  double weight_sum = 0.0;
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const Sample& s = samples_[k];
    if (!(s.weight > 0.0 && s.weight <= 1.0)) {
      throw std::invalid_argument("VIProblem: weight of sample " +
                                  std::to_string(k) + " outside (0,1]");
    }
    if (!(s.op.domain_shape() == param_shape_)) {
      throw std::invalid_argument("VIProblem: operator domain " +
                                  s.op.domain_shape().str() +
                                  " != parameter shape " + param_shape_.str());
    }
    if (!(s.target.shape() == s.op.codomain_shape())) {
      throw std::invalid_argument("VIProblem: target shape " +
                                  s.target.shape().str() +
                                  " != operator codomain " +
                                  s.op.codomain_shape().str());
    }
    weight_sum += s.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12 * samples_.size()) {
    throw std::invalid_argument("VIProblem: weights sum to " +
                                std::to_string(weight_sum) + ", expected 1");
  }
  for (const Sample& s : samples_) {
    max_norm_sq_ = std::max(max_norm_sq_, operator_norm_sq(s.op).norm_sq);
  }
}

Tensor VIProblem::residual_map(const Tensor& theta) const {
  require_shape(theta, param_shape_, "residual_map");
  Tensor acc(param_shape_);
  Tensor t(param_shape_);
  for (const Sample& s : samples_) {
    Tensor z = s.op.apply(theta);
    activation_.apply_inplace(z);
    sub_inplace(z, s.target);
    s.op.adjoint_into(z, t);
    add_scaled(acc, s.weight, t);
  }
  return acc;
}

double VIProblem::max_step_size() const {
  if (max_norm_sq_ <= 0.0) {
    throw std::domain_error("degenerate problem: zero operator family");
  }
  return 2.0 / max_norm_sq_;
}

double VIProblem::natural_residual(const Tensor& theta, double gamma) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("natural_residual: gamma <= 0");
  Tensor step = residual_map(theta);
  // step := theta - gamma F(theta), projected
  for (std::size_t i = 0; i < step.size(); ++i) {
    step[i] = theta[i] - gamma * step[i];
  }
  constraint_.project_inplace(step);
  double acc = 0.0;
  for (std::size_t i = 0; i < step.size(); ++i) {
    const double d = theta[i] - step[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double VIProblem::training_error(const Tensor& theta, int ord) const {
  if (ord != 1 && ord != 2) throw std::invalid_argument("training_error: ord must be 1 or 2");
  require_shape(theta, param_shape_, "training_error");
  double acc = 0.0;
  for (const Sample& s : samples_) {
    Tensor z = s.op.apply(theta);
    activation_.apply_inplace(z);
    sub_inplace(z, s.target);
    acc += (ord == 1) ? norm_l1(z) : norm_l2_sq(z);
  }
  return acc / static_cast<double>(samples_.size());
}

VIProblem load_problem_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw std::runtime_error("cannot open problem manifest: " + manifest_path.string());
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  const auto dir = manifest_path.parent_path();

  std::vector<std::size_t> kdims = doc.at("kernel_shape").get<std::vector<std::size_t>>();
  const Shape kernel_shape{std::vector<std::size_t>(kdims)};
  const Activation act = Activation::parse(doc.at("activation").get<std::string>());
  const ConstraintSet cset =
      ConstraintSet::parse(doc.at("constraint").get<std::string>(), kernel_shape);

  std::vector<Sample> samples;
  for (const auto& entry : doc.at("samples")) {
    Tensor features = read_vlt1(dir / entry.at("features").get<std::string>());
    Tensor target = read_vlt1(dir / entry.at("target").get<std::string>());
    Sample s{LinearOperator::conv_features(std::move(features), kernel_shape),
             std::move(target), entry.at("weight").get<double>()};
    samples.push_back(std::move(s));
  }
  return VIProblem(std::move(samples), act, cset, kernel_shape);
}

void write_problem_manifest(const std::filesystem::path& manifest_path,
                            const std::vector<std::string>& feature_files,
                            const std::vector<std::string>& target_files,
                            const std::vector<double>& weights,
                            const Shape& kernel_shape,
                            const std::string& activation_spec,
                            const std::string& constraint_spec) {
  if (feature_files.size() != target_files.size() ||
      feature_files.size() != weights.size()) {
    throw std::invalid_argument("problem manifest: list length mismatch");
  }
  nlohmann::json doc;
  doc["kernel_shape"] = kernel_shape.dims;
  doc["activation"] = activation_spec;
  doc["constraint"] = constraint_spec;
  auto& arr = doc["samples"] = nlohmann::json::array();
  for (std::size_t k = 0; k < feature_files.size(); ++k) {
    arr.push_back({{"features", feature_files[k]},
                   {"target", target_files[k]},
                   {"weight", weights[k]}});
  }
  atomic_write(manifest_path, doc.dump(2) + "\n");
}

}  // namespace vilt
