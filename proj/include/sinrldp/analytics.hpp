#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sinrldp/config.hpp"
#include "sinrldp/numerics.hpp"
#include "sinrldp/partition.hpp"

namespace sinrldp {

// ---------------------------------------------------------------------------
// Reference measures on a partition

/// Binned eta (x) Exponential(c).
BinnedMeasure reference_power_measure(const ModelConfig& config, const PartitionSpec& part);

/// Mean of Exponential(c) conditioned on power bin p.
double representative_power(const ModelConfig& config, const PartitionSpec& part, std::size_t p);

/// h* at (spatial center, representative power) for every ordered cell pair.
std::vector<double> hstar_cell_matrix(const ModelConfig& config, const PartitionSpec& part);

/// (h* sigma (x) sigma)(A, B) = h*(A, B) sigma(A) sigma(B).
BinnedMeasure link_reference_measure(const ModelConfig& config, const PartitionSpec& part,
                                     const BinnedMeasure& sigma);

// ---------------------------------------------------------------------------
// Link probability

/// Integral over D of u_x/(u_x + |z|^l/|x-y|^l) + u_y/(u_y + |z|^l/|y-x|^l) against
/// eta, with u_w = tau(rho_w) gamma(rho_w). With recenter_interference the two
/// distances |z| become |z - y| and |z - x|. Throws QuadratureError when the
/// adaptive rule does not reach the tolerance.
numerics::QuadResult h_lambda_D(std::span<const double> x, double rho_x,
                                std::span<const double> y, double rho_y,
                                const ModelConfig& config,
                                const numerics::AdaptiveOptions& opts = {});

/// exp(-lambda h_lambda_D).
double link_probability(std::span<const double> x, double rho_x, std::span<const double> y,
                        double rho_y, const ModelConfig& config);

struct HStarDiagnosticRow {
  double lambda;
  double h;
  double p;
  double value;  // lambda^2 a_lambda p_lambda
};

std::vector<HStarDiagnosticRow> h_star_diagnostic(std::span<const double> x, double rho_x,
                                                  std::span<const double> y, double rho_y,
                                                  const ModelConfig& config,
                                                  std::span<const double> lambda_grid);

// ---------------------------------------------------------------------------
// Radial integrals and the typical SINR law

/// Integral of |z - x|^{-ell} dz over a box; requires ell < dimension.
double radial_box_integral(const Box& box, std::span<const double> x, double ell);

/// Integral over D of |z - x|^{-ell} eta(dz).
double eta_radial_integral(const ModelConfig& config, std::span<const double> x);

/// Integral over `region` of |z - x|^{-ell} eta(dz).
double eta_radial_integral(const ModelConfig& config, const Box& region,
                           std::span<const double> x);

/// Limiting neighbor-SINR law at every cell: receiver at the spatial center with the
/// bin's representative power, neighbors drawn from h* eta (x) q, interference from
/// the eta (x) q field. Throws ConfigError when ell >= d or h* is missing.
SinrProfile typical_sinr_measure(const ModelConfig& config, const PartitionSpec& part);

/// P(SINR >= a) for the same law at receiver (x, rho_x).
double typical_sinr_survival(const ModelConfig& config, std::span<const double> x, double rho_x,
                             double a);

// ---------------------------------------------------------------------------
// Conditional SINR kernel

enum class PhiRule {
  cell_average,  // receiver and transmitter averaged over each cell's reference law
  cell_center,   // both at cell centers, transmitter power at the bin representative
};

struct PhiOptions {
  PhiRule rule = PhiRule::cell_average;
  std::size_t order = 6;  // Gauss points per axis for receivers; transmitters use order + 1
};

/// Geometry shared by every evaluation of the kernel on one partition.
class PhiGeometry {
 public:
  PhiGeometry(const ModelConfig& config, const PartitionSpec& part, PhiOptions opts = {});

  const ModelConfig& config() const { return config_; }
  const PartitionSpec& partition() const { return part_; }

  struct NodeSet {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;  // sum to 1
  };
  const NodeSet& receivers(std::size_t s) const { return rx_[s]; }
  const NodeSet& transmitters(std::size_t s) const { return tx_[s]; }
  /// |x - y|^ell for receiver node i of cell a and transmitter node j of cell b.
  double distance_pow(std::size_t a, std::size_t i, std::size_t b, std::size_t j) const;
  /// Mean of |z - x|^{-ell} over cell s's reference law, x = receiver node i of cell a.
  double cell_gain(std::size_t a, std::size_t i, std::size_t s) const;
  const std::vector<double>& representative_powers() const { return rho_bar_; }

 private:
  ModelConfig config_;
  PartitionSpec part_;
  std::vector<NodeSet> rx_;
  std::vector<NodeSet> tx_;
  std::vector<std::size_t> rx_offset_;
  std::vector<std::size_t> tx_offset_;
  std::size_t tx_total_ = 0;
  std::vector<double> dpow_;   // [rx global][tx global]
  std::vector<double> gains_;  // [rx global][spatial cell]
  std::vector<double> rho_bar_;
};

/// Phi-weights Phi(A, B, k): probability that the SINR of a B-transmitter at an
/// A-receiver falls in SINR bin k, with interference from the sigma field.
/// Depends on A only through its spatial cell.
class PhiWeights {
 public:
  PhiWeights(const PhiGeometry& geometry, const BinnedMeasure& sigma);

  std::size_t bins() const { return bins_; }
  std::span<const double> weights(std::size_t spatial_a, std::size_t cell_b) const {
    return {phi_.data() + (spatial_a * cells_ + cell_b) * bins_, bins_};
  }
  /// N0 + gamma * interference at receiver node i of spatial cell a.
  const std::vector<std::vector<double>>& denominators() const { return denom_; }

 private:
  std::size_t cells_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> phi_;
  std::vector<std::vector<double>> denom_;
};

/// Rows <Phi_sigma, omega>_A = sum_B Phi(A, B, .) omega(B, A) / omega_2(A);
/// rows with omega_2(A) = 0 are empty.
SinrProfile kernel_profile(const PhiWeights& phi, const BinnedMeasure& omega,
                           const PartitionSpec& part);

/// Single kernel entry; nullopt when omega_2(A) = 0.
std::optional<double> phi_kernel(std::size_t cell, std::size_t sinr_bin,
                                 const BinnedMeasure& sigma, const BinnedMeasure& omega,
                                 const ModelConfig& config, const PartitionSpec& part,
                                 PhiOptions opts = {});

// ---------------------------------------------------------------------------
// Entropies and rate functions

/// sum sigma log(sigma/mu); +inf when sigma charges a mu-null cell.
double rel_entropy(std::span<const double> sigma, std::span<const double> mu);
double rel_entropy(const BinnedMeasure& sigma, const BinnedMeasure& mu);

/// sum omega log(omega/m) - |omega| + |m|; +inf when |omega| = 0 or omega is not
/// absolutely continuous with respect to m.
double rel_entropy_unnorm(std::span<const double> omega, std::span<const double> m);
double rel_entropy_unnorm(const BinnedMeasure& omega, const BinnedMeasure& m);

/// sup_g { g w - (e^g - 1) m } by golden-section search.
double cumulant_dual(double w, double m);

struct RateReport {
  double power_term = 0.0;
  double link_term = 0.0;
  double sinr_term = 0.0;
  double total = 0.0;
  bool infinite = false;
  std::string infinite_component;  // "power", "link" or "sinr"
};

/// Evaluates the rate functions on one partition, caching the reference measure,
/// the h* cell matrix and the kernel geometry.
class RateEvaluator {
 public:
  RateEvaluator(const ModelConfig& config, const PartitionSpec& part, PhiOptions opts = {});

  const BinnedMeasure& reference() const { return reference_; }
  const std::vector<double>& hstar() const { return hstar_; }
  const PhiGeometry& geometry() const;

  BinnedMeasure link_reference(const BinnedMeasure& sigma) const;
  SinrProfile kernel(const BinnedMeasure& sigma, const BinnedMeasure& omega) const;

  RateReport I1(const BinnedMeasure& sigma) const;
  RateReport I_sigma(const BinnedMeasure& omega, const BinnedMeasure& sigma) const;
  RateReport I(const BinnedMeasure& sigma, const BinnedMeasure& omega) const;
  RateReport J_tilde(const SinrProfile& nu, const BinnedMeasure& sigma,
                     const BinnedMeasure& omega) const;
  RateReport J_star(const BinnedMeasure& sigma, const BinnedMeasure& omega,
                    const SinrProfile& nu) const;

 private:
  ModelConfig config_;
  PartitionSpec part_;
  PhiOptions opts_;
  BinnedMeasure reference_;
  std::vector<double> hstar_;
  mutable std::optional<PhiGeometry> geometry_;
};

RateReport rate_I1(const BinnedMeasure& sigma, const ModelConfig& config,
                   const PartitionSpec& part);
RateReport rate_I_sigma(const BinnedMeasure& omega, const BinnedMeasure& sigma,
                        const ModelConfig& config, const PartitionSpec& part);
RateReport rate_I(const BinnedMeasure& sigma, const BinnedMeasure& omega,
                  const ModelConfig& config, const PartitionSpec& part);
RateReport rate_J_tilde(const SinrProfile& nu, const BinnedMeasure& sigma,
                        const BinnedMeasure& omega, const ModelConfig& config,
                        const PartitionSpec& part);
RateReport rate_J_star(const BinnedMeasure& sigma, const BinnedMeasure& omega,
                       const SinrProfile& nu, const ModelConfig& config,
                       const PartitionSpec& part);

}  // namespace sinrldp
