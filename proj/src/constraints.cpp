#include "vilt/constraints.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vilt {

ConstraintSet ConstraintSet::box(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("box constraint: lo > hi");
  ConstraintSet c(Kind::box);
  c.lo_ = lo;
  c.hi_ = hi;
  return c;
}

ConstraintSet ConstraintSet::ball(Tensor center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball constraint: radius <= 0");
  ConstraintSet c(Kind::ball);
  c.center_ = std::move(center);
  c.radius_ = radius;
  return c;
}

namespace {
double parse_num(std::string_view s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("bad ") + what + ": " + std::string(s));
  }
  return v;
}
}  // namespace

ConstraintSet ConstraintSet::parse(std::string_view spec, const Shape& param_shape) {
  if (spec == "none" || spec == "whole_space") return whole_space();
  if (spec == "nonneg") return nonneg();
  const auto first = spec.find(':');
  if (first != std::string_view::npos) {
    const auto head = spec.substr(0, first);
    const auto rest = spec.substr(first + 1);
    const auto second = rest.find(':');
    if (second == std::string_view::npos) {
      throw std::invalid_argument("bad constraint spec: " + std::string(spec));
    }
    const double a = parse_num(rest.substr(0, second), "constraint parameter");
    const double b = parse_num(rest.substr(second + 1), "constraint parameter");
    if (head == "box") return box(a, b);
    if (head == "ball") {
      Tensor center(param_shape);
      center.fill(a);
      return ball(std::move(center), b);
    }
  }
  throw std::invalid_argument("unknown constraint: " + std::string(spec));
}

void ConstraintSet::project_inplace(Tensor& theta) const {
  switch (kind_) {
    case Kind::whole_space:
      return;
    case Kind::box:
      for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] < lo_) theta[i] = lo_;
        else if (theta[i] > hi_) theta[i] = hi_;
      }
      return;
    case Kind::nonneg:
      for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] < 0.0) theta[i] = 0.0;
      }
      return;
    case Kind::ball: {
      require_shape(theta, center_->shape(), "ball projection");
      auto dist = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
          const double d = theta[i] - (*center_)[i];
          acc += d * d;
        }
        return std::sqrt(acc);
      };
      // Shrink only when strictly outside; a boundary point stays put. One
      // scale can land a few ulps outside the radius, so repeat until the
      // recomputed distance is inside -- this makes the projection exactly
      // idempotent.
      for (int pass = 0; pass < 8; ++pass) {
        const double d = dist();
        if (!(d > radius_)) break;
        const double s = radius_ / d;
        for (std::size_t i = 0; i < theta.size(); ++i) {
          theta[i] = (*center_)[i] + s * (theta[i] - (*center_)[i]);
        }
      }
      return;
    }
  }
}

Tensor ConstraintSet::project(const Tensor& theta) const {
  Tensor out = theta;
  project_inplace(out);
  return out;
}

}  // namespace vilt
