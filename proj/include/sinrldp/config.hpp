#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinrldp/geometry.hpp"

namespace sinrldp {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Piecewise-constant field on a tensor grid over the window. Cells are flattened
/// with axis 0 varying fastest.
struct GridField {
  std::vector<std::size_t> bins;
  std::vector<double> values;

  std::size_t cell_count() const;
  std::size_t cell_index(const Box& window, std::span<const double> x) const;
  Box cell_box(const Box& window, std::size_t index) const;
  double at(const Box& window, std::span<const double> x) const {
    return values[cell_index(window, x)];
  }
};

/// Piecewise-constant function on (0, inf): values[k] applies on [edges[k-1], edges[k]).
struct PiecewiseConstant1D {
  std::vector<double> edges;
  std::vector<double> values;

  double at(double x) const;
};

enum class EtaKind { uniform, grid };

/// Spatial density of the rate measure, constant on each piece.
struct EtaDensity {
  EtaKind kind = EtaKind::uniform;
  double mass = 1.0;  // uniform only
  GridField grid;     // grid only; values are densities

  struct Piece {
    Box box;
    double density;
  };
  std::vector<Piece> pieces(const Box& window) const;
  double total_mass(const Box& window) const;
  double mass_in(const Box& window, const Box& region) const;
  double at(const Box& window, std::span<const double> x) const;
};

enum class HStarKind { constant, product, tabulated };

/// Limiting link intensity h*((x, rho_x), (y, rho_y)).
struct HStar {
  HStarKind kind = HStarKind::constant;
  double value = 0.0;  // constant

  // product: f(x) f(y) g(rho_x) g(rho_y); an absent factor is identically 1.
  std::optional<GridField> f;
  std::optional<PiecewiseConstant1D> g;

  // tabulated: symmetric matrix over cells of (spatial grid) x (power bins).
  std::vector<std::size_t> spatial_bins;
  std::vector<double> power_edges;
  std::vector<double> table;

  double operator()(const Box& window, std::span<const double> x, double rho_x,
                    std::span<const double> y, double rho_y) const;

  /// Coordinates where h* may jump, per spatial axis, and in power.
  std::vector<std::vector<double>> spatial_breaks(const Box& window) const;
  std::vector<double> power_breaks() const;
};

enum class ThresholdScaling { fixed, log_over_lambda };
enum class ThresholdIndexing { far, near };
enum class ScalingRegime { critical, subcritical, supercritical };
enum class EdgeMode { physical, limit };

std::string to_string(ThresholdScaling v);
std::string to_string(ThresholdIndexing v);
std::string to_string(ScalingRegime v);
std::string to_string(EdgeMode v);

struct ModelConfig {
  std::size_t dimension = 2;
  Box window = Box::unit(2);
  double lambda = 100.0;
  EtaDensity eta;
  double power_rate = 1.0;
  double path_loss_exponent = 1.0;
  double noise = 0.0;
  double tau_base = 1.0;
  double gamma_base = 1.0;
  /// tau(rho) = tau_base * s(lambda) * rho^tau_power_exponent.
  double tau_power_exponent = 0.0;
  ThresholdScaling threshold_scaling = ThresholdScaling::fixed;
  ThresholdIndexing threshold_indexing = ThresholdIndexing::far;
  ScalingRegime scaling_regime = ScalingRegime::critical;
  EdgeMode edge_mode = EdgeMode::physical;
  bool recenter_interference = false;
  std::optional<HStar> h_star;
  /// Power at which the SINR axis floor tau is evaluated; defaults to 1/c.
  std::optional<double> sinr_reference_power;

  /// Throws ConfigError naming the offending key and constraint.
  void validate() const;

  double threshold_scale() const;
  double tau(double rho) const;
  double gamma(double rho) const;
  double threshold_product(double rho) const { return tau(rho) * gamma(rho); }
  double a_lambda() const;
  double limit_edge_probability(double h) const;
  double reference_power() const;
  double sinr_floor() const { return tau(reference_power()); }
  double eta_mass() const { return eta.total_mass(window); }

  ModelConfig with_lambda(double lambda) const;
};

}  // namespace sinrldp
