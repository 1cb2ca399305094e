#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vilt {

/// Dimensions of a tensor, e.g. [64,1,7,7] for a kernel stack or [N,N] for
/// an image. All dims are >= 1.
struct Shape {
  std::vector<std::size_t> dims;

  Shape() = default;
  Shape(std::initializer_list<std::size_t> d) : dims(d) { validate(); }
  explicit Shape(std::vector<std::size_t> d) : dims(std::move(d)) { validate(); }

  std::size_t numel() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
  std::size_t rank() const { return dims.size(); }
  std::size_t operator[](std::size_t i) const { return dims[i]; }

  bool operator==(const Shape& other) const = default;

  std::string str() const;

 private:
  void validate() const;
};

/// Flat double storage with a declared shape. Used for parameter vectors,
/// images and feature stacks alike; row-major indexing.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape)
      : shape_(std::move(shape)), data_(shape_.numel(), 0.0) {}
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  /// Same storage reinterpreted under a new shape of equal element count.
  Tensor reshaped(Shape new_shape) const;

  void fill(double v) { for (auto& x : data_) x = v; }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Elementwise helpers. All of them require matching sizes and accumulate in
// index order so results are deterministic.
double dot(const Tensor& a, const Tensor& b);
double norm_l2(const Tensor& a);
double norm_l2_sq(const Tensor& a);
double norm_l1(const Tensor& a);
double norm_linf(const Tensor& a);

void add_inplace(Tensor& a, const Tensor& b);         // a += b
void sub_inplace(Tensor& a, const Tensor& b);         // a -= b
void scale_inplace(Tensor& a, double s);              // a *= s
void add_scaled(Tensor& a, double s, const Tensor& b);  // a += s*b

/// Throws std::invalid_argument when the shapes differ.
void require_shape(const Tensor& t, const Shape& expected, const char* what);

}  // namespace vilt
