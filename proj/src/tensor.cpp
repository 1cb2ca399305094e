#include "vilt/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace vilt {

void Shape::validate() const {
  if (dims.empty()) throw std::invalid_argument("Shape: no dimensions");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("Shape: zero dimension");
  }
}

std::string Shape::str() const {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != shape_.numel()) {
    throw std::invalid_argument("Tensor: value count " +
                                std::to_string(data_.size()) +
                                " does not match shape " + shape_.str());
  }
}

Tensor Tensor::reshaped(Shape new_shape) const {
  if (new_shape.numel() != size()) {
    throw std::invalid_argument("reshape: element count mismatch (" +
                                shape_.str() + " -> " + new_shape.str() + ")");
  }
  return Tensor(std::move(new_shape), data_);
}

namespace {
void require_same_size(const Tensor& a, const Tensor& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": size mismatch");
  }
}
}  // namespace

double dot(const Tensor& a, const Tensor& b) {
  require_same_size(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_l2_sq(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * a[i];
  return acc;
}

double norm_l2(const Tensor& a) { return std::sqrt(norm_l2_sq(a)); }

double norm_l1(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i]);
  return acc;
}

double norm_linf(const Tensor& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

void add_inplace(Tensor& a, const Tensor& b) {
  require_same_size(a, b, "add");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void sub_inplace(Tensor& a, const Tensor& b) {
  require_same_size(a, b, "sub");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
}

void scale_inplace(Tensor& a, double s) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= s;
}

void add_scaled(Tensor& a, double s, const Tensor& b) {
  require_same_size(a, b, "add_scaled");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

void require_shape(const Tensor& t, const Shape& expected, const char* what) {
  if (!(t.shape() == expected)) {
    throw std::invalid_argument(std::string(what) + ": expected shape " +
                                expected.str() + ", got " + t.shape().str());
  }
}

}  // namespace vilt
