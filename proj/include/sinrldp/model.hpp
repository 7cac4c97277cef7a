#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sinrldp/config.hpp"

namespace sinrldp {

struct PoweredPoint {
  std::vector<double> location;
  double power = 0.0;
};

using Edge = std::pair<std::size_t, std::size_t>;  // first < second

struct SinrNetwork {
  std::vector<PoweredPoint> points;
  std::vector<Edge> edges;  // sorted lexicographically
  ModelConfig config;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

/// Poisson point process with intensity lambda * eta on the window. Locations are
/// pairwise distinct (a repeated location is redrawn).
std::vector<std::vector<double>> sample_ppp(const ModelConfig& config, std::uint64_t seed,
                                            std::uint64_t trial = 0);

/// Attaches i.i.d. Exponential(power_rate) powers.
std::vector<PoweredPoint> assign_powers(std::vector<std::vector<double>> locations,
                                        const ModelConfig& config, std::uint64_t seed,
                                        std::uint64_t trial = 0);

/// SINR at receiver j of the signal from transmitter i, with interference from every
/// other point. Returns +inf when the denominator vanishes. Throws std::domain_error
/// for coincident locations.
double sinr(std::size_t i, std::size_t j, std::span<const PoweredPoint> points,
            const ModelConfig& config);

/// Threshold applied to the signal i -> j under the configured indexing convention.
double link_threshold(const PoweredPoint& transmitter, const PoweredPoint& receiver,
                      const ModelConfig& config);

/// Two-sided SINR rule for one pair, evaluated by direct summation (O(n)).
bool linked_physical(std::size_t i, std::size_t j, std::span<const PoweredPoint> points,
                     const ModelConfig& config);

/// Exact O(n^2) construction of the physical SINR graph.
SinrNetwork build_network_physical(std::vector<PoweredPoint> points, const ModelConfig& config);

/// Independent links with probability min(1, h*/(lambda^2 a_lambda)).
SinrNetwork build_network_limit(std::vector<PoweredPoint> points, const ModelConfig& config,
                                std::uint64_t seed, std::uint64_t trial = 0);

/// Sample points and powers, then build edges by the configured mode.
SinrNetwork generate_network(const ModelConfig& config, std::uint64_t seed,
                             std::uint64_t trial = 0);

/// Sum over k of rho_k |Y_k - Y_j|^{-ell} for every receiver j (k != j).
std::vector<double> received_totals(std::span<const PoweredPoint> points, double ell);

}  // namespace sinrldp
