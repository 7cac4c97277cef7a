#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sinrldp {

/// Axis-aligned closed box [lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box unit(std::size_t dim);

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  double width(std::size_t axis) const { return hi[axis] - lo[axis]; }
  std::vector<double> center() const;
  bool contains(std::span<const double> x) const;
  bool empty() const;  // some axis has non-positive width

  friend bool operator==(const Box&, const Box&) = default;
};

Box intersect(const Box& a, const Box& b);

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> x);

/// Path gain r^{-ell} given the squared distance r^2.
inline double path_gain_from_squared(double r2, double ell) {
  if (ell == 1.0) return 1.0 / std::sqrt(r2);
  if (ell == 2.0) return 1.0 / r2;
  return std::pow(r2, -0.5 * ell);
}

/// Splits `box` into the tensor grid induced by per-axis breakpoints. Breakpoints
/// outside the open axis interval are ignored.
std::vector<Box> split_box(const Box& box, const std::vector<std::vector<double>>& breaks);

}  // namespace sinrldp
