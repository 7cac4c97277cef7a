#include "sinrldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "sinrldp/rng.hpp"

namespace sinrldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gain(const PoweredPoint& a, const PoweredPoint& b, double ell) {
  const double r2 = squared_distance(a.location, b.location);
  if (r2 == 0.0) throw std::domain_error("coincident locations: path gain is infinite");
  return path_gain_from_squared(r2, ell);
}

double sinr_from(double signal, double interference, const ModelConfig& config, double rho_rx) {
  const double denom = config.noise + config.gamma(rho_rx) * interference;
  if (denom == 0.0) return signal > 0.0 ? kInf : 0.0;
  return signal / denom;
}

}  // namespace

std::vector<std::vector<double>> sample_ppp(const ModelConfig& config, std::uint64_t seed,
                                            std::uint64_t trial) {
  RngStream rng(seed, trial, StreamPurpose::ppp);
  const auto pieces = config.eta.pieces(config.window);
  std::vector<double> cumulative;
  cumulative.reserve(pieces.size());
  double total = 0.0;
  for (const auto& p : pieces) {
    total += p.density * p.box.volume();
    cumulative.push_back(total);
  }
  const std::uint64_t n = rng.poisson(config.lambda * total);
  std::vector<std::vector<double>> out;
  out.reserve(n);
  std::set<std::vector<double>> seen;
  const std::size_t d = config.dimension;
  while (out.size() < n) {
    const Box& box = pieces[rng.categorical(cumulative.data(), cumulative.size())].box;
    std::vector<double> x(d);
    for (std::size_t a = 0; a < d; ++a) x[a] = rng.uniform(box.lo[a], box.hi[a]);
    if (!seen.insert(x).second) continue;
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<PoweredPoint> assign_powers(std::vector<std::vector<double>> locations,
                                        const ModelConfig& config, std::uint64_t seed,
                                        std::uint64_t trial) {
  RngStream rng(seed, trial, StreamPurpose::powers);
  std::vector<PoweredPoint> out;
  out.reserve(locations.size());
  for (auto& loc : locations) out.push_back({std::move(loc), rng.exponential(config.power_rate)});
  return out;
}

double sinr(std::size_t i, std::size_t j, std::span<const PoweredPoint> points,
            const ModelConfig& config) {
  if (i == j) throw std::invalid_argument("sinr: transmitter and receiver must differ");
  const double ell = config.path_loss_exponent;
  const double signal = points[i].power * gain(points[i], points[j], ell);
  double interference = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k == i || k == j) continue;
    interference += points[k].power * gain(points[k], points[j], ell);
  }
  return sinr_from(signal, interference, config, points[j].power);
}

double link_threshold(const PoweredPoint& transmitter, const PoweredPoint& receiver,
                      const ModelConfig& config) {
  return config.threshold_indexing == ThresholdIndexing::far ? config.tau(transmitter.power)
                                                              : config.tau(receiver.power);
}

bool linked_physical(std::size_t i, std::size_t j, std::span<const PoweredPoint> points,
                     const ModelConfig& config) {
  return sinr(i, j, points, config) >= link_threshold(points[i], points[j], config) &&
         sinr(j, i, points, config) >= link_threshold(points[j], points[i], config);
}

std::vector<double> received_totals(std::span<const PoweredPoint> points, double ell) {
  const std::size_t n = points.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) s += points[k].power * gain(points[k], points[j], ell);
    }
    total[j] = s;
  }
  return total;
}

SinrNetwork build_network_physical(std::vector<PoweredPoint> points, const ModelConfig& config) {
  SinrNetwork net;
  net.config = config;
  const std::size_t n = points.size();
  const double ell = config.path_loss_exponent;
  const std::vector<double> total = received_totals(points, ell);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double g = gain(points[i], points[j], ell);
      const double s_ij = points[i].power * g;
      const double s_ji = points[j].power * g;
      const double sinr_ij =
          sinr_from(s_ij, std::max(0.0, total[j] - s_ij), config, points[j].power);
      if (sinr_ij < link_threshold(points[i], points[j], config)) continue;
      const double sinr_ji =
          sinr_from(s_ji, std::max(0.0, total[i] - s_ji), config, points[i].power);
      if (sinr_ji < link_threshold(points[j], points[i], config)) continue;
      net.edges.emplace_back(i, j);
    }
  }
  net.points = std::move(points);
  return net;
}

SinrNetwork build_network_limit(std::vector<PoweredPoint> points, const ModelConfig& config,
                                std::uint64_t seed, std::uint64_t trial) {
  if (!config.h_star) throw ConfigError("h_star required when edge_mode is limit");
  SinrNetwork net;
  net.config = config;
  net.seed = seed;
  net.trial = trial;
  RngStream rng(seed, trial, StreamPurpose::edges);
  const HStar& h = *config.h_star;
  const std::size_t n = points.size();
  if (h.kind == HStarKind::constant) {
    const double p = config.limit_edge_probability(h.value);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.uniform() < p) net.edges.emplace_back(i, j);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = config.limit_edge_probability(
            h(config.window, points[i].location, points[i].power, points[j].location,
              points[j].power));
        if (rng.uniform() < p) net.edges.emplace_back(i, j);
      }
    }
  }
  net.points = std::move(points);
  return net;
}

SinrNetwork generate_network(const ModelConfig& config, std::uint64_t seed, std::uint64_t trial) {
  auto points = assign_powers(sample_ppp(config, seed, trial), config, seed, trial);
  SinrNetwork net = config.edge_mode == EdgeMode::physical
                        ? build_network_physical(std::move(points), config)
                        : build_network_limit(std::move(points), config, seed, trial);
  net.seed = seed;
  net.trial = trial;
  return net;
}

}  // namespace sinrldp
