#include "vilt/activations.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include "vilt/rng.hpp"

namespace vilt {

Activation Activation::leaky_relu(double slope) {
  if (!(slope >= 0.0 && slope <= 1.0)) {
    throw std::invalid_argument("leaky_relu slope must lie in [0,1], got " +
                                std::to_string(slope));
  }
  return Activation(Kind::leaky_relu, slope);
}

Activation Activation::parse(std::string_view spec) {
  if (spec == "identity") return identity();
  if (spec == "relu") return relu();
  constexpr std::string_view prefix = "leaky_relu:";
  if (spec.size() > prefix.size() && spec.substr(0, prefix.size()) == prefix) {
    const std::string_view num = spec.substr(prefix.size());
    double slope = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), slope);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw std::invalid_argument("bad activation slope: " + std::string(spec));
    }
    return leaky_relu(slope);
  }
  throw std::invalid_argument("unknown activation: " + std::string(spec));
}

std::string Activation::spec() const {
  switch (kind_) {
    case Kind::identity: return "identity";
    case Kind::relu: return "relu";
    case Kind::leaky_relu: return "leaky_relu:" + std::to_string(slope_);
  }
  return "identity";
}

void Activation::apply_inplace(Tensor& z) const {
  if (kind_ == Kind::identity) return;
  double* d = z.data();
  const double a = slope_;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (d[i] < 0.0) d[i] *= a;
  }
}

Tensor Activation::apply(const Tensor& z) const {
  Tensor out = z;
  apply_inplace(out);
  return out;
}

FirmlyNonexpansiveReport check_firm_nonexpansive(const Activation& act,
                                                 int trials, int dim,
                                                 std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_firm_nonexpansive: trials < 1");
  if (dim < 1) throw std::invalid_argument("check_firm_nonexpansive: dim < 1");
  Rng rng(seed);
  FirmlyNonexpansiveReport report;
  bool first = true;
  for (int t = 0; t < trials; ++t) {
    double lhs = 0.0;  // <z1-z2, Rz1-Rz2>
    double rhs = 0.0;  // ||Rz1-Rz2||^2
    for (int i = 0; i < dim; ++i) {
      const double z1 = rng.uniform(-10.0, 10.0);
      const double z2 = rng.uniform(-10.0, 10.0);
      const double dr = act(z1) - act(z2);
      lhs += (z1 - z2) * dr;
      rhs += dr * dr;
    }
    const double margin = lhs - rhs;
    if (first || margin < report.worst_margin) report.worst_margin = margin;
    first = false;
    if (margin < -1e-12) ++report.violations;
  }
  return report;
}

}  // namespace vilt
