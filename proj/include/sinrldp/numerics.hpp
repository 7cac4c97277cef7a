#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinrldp/geometry.hpp"

namespace sinrldp::numerics {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule; safe to call concurrently.
const GaussRule& gauss_legendre(std::size_t n);

/// Tensor-product nodes of an n-point rule mapped onto `box`. Weights include the
/// box volume, so they sum to box.volume().
struct TensorNodes {
  std::size_t dim = 0;
  std::vector<double> coords;  // node-major, dim entries per node
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

TensorNodes tensor_nodes(const Box& box, std::size_t points_per_axis);

using Integrand = std::function<double(std::span<const double>)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Raised when adaptive refinement reaches its depth or work limit without meeting
/// the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_depth = 20;
  std::size_t rule_points = 3;
  std::size_t max_evaluations = 200'000'000;
};

/// Globally adaptive dyadic cubature. Every leaf box carries a single-box tensor
/// Gauss estimate Q and the sum Q2 over its 2^d dyadic children; the leaf error is
/// the Richardson estimate |Q2 - Q| / (2^2 - 1) and the leaf with the largest error
/// is split until the summed error meets max(abs_tol, rel_tol * |value|).
QuadResult integrate_adaptive(const Integrand& f, const Box& box,
                              const AdaptiveOptions& opts = {});

/// Same, over a collection of disjoint boxes sharing one error budget. Used when the
/// integrand is known to jump across box faces.
QuadResult integrate_adaptive(const Integrand& f, std::span<const Box> pieces,
                              const AdaptiveOptions& opts = {});

struct Extremum {
  double argument = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
Extremum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                 double x_tol = 1e-12, int max_iterations = 500);

Extremum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                 double x_tol = 1e-12, int max_iterations = 500);

}  // namespace sinrldp::numerics
