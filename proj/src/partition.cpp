#include "sinrldp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sinrldp {

std::size_t PartitionSpec::spatial_cells() const {
  std::size_t n = 1;
  for (std::size_t b : spatial_bins) n *= b;
  return n;
}

std::size_t PartitionSpec::spatial_index(std::span<const double> x) const {
  return GridField{spatial_bins, {}}.cell_index(window, x);
}

std::size_t PartitionSpec::power_index(double rho) const {
  return static_cast<std::size_t>(
      std::upper_bound(power_edges.begin(), power_edges.end(), rho) - power_edges.begin());
}

std::size_t PartitionSpec::sinr_index(double value) const {
  return static_cast<std::size_t>(
      std::upper_bound(sinr_edges.begin(), sinr_edges.end(), value) - sinr_edges.begin());
}

Box PartitionSpec::spatial_box(std::size_t s) const {
  return GridField{spatial_bins, {}}.cell_box(window, s);
}

double PartitionSpec::power_hi(std::size_t p) const {
  return p < power_edges.size() ? power_edges[p] : std::numeric_limits<double>::infinity();
}

void PartitionSpec::validate() const {
  if (spatial_bins.size() != window.dim()) {
    throw ConfigError("partition.spatial_bins: one count per axis required");
  }
  for (std::size_t b : spatial_bins) {
    if (b < 1) throw ConfigError("partition.spatial_bins: counts must be >= 1");
  }
  for (std::size_t i = 0; i < power_edges.size(); ++i) {
    if (!(std::isfinite(power_edges[i]) && power_edges[i] > 0.0)) {
      throw ConfigError("partition.power_edges: edges must be finite and > 0");
    }
    if (i > 0 && !(power_edges[i] > power_edges[i - 1])) {
      throw ConfigError("partition.power_edges: edges must be strictly increasing");
    }
  }
  if (sinr_edges.empty()) throw ConfigError("partition.sinr_edges: floor edge missing");
  for (std::size_t i = 0; i < sinr_edges.size(); ++i) {
    if (!(std::isfinite(sinr_edges[i]) && sinr_edges[i] >= 0.0)) {
      throw ConfigError("partition.sinr_edges: edges must be finite and >= 0");
    }
    if (i > 0 && !(sinr_edges[i] > sinr_edges[i - 1])) {
      throw ConfigError("partition.sinr_edges: edges must be strictly increasing above tau");
    }
  }
}

PartitionSpec make_partition(const ModelConfig& config, std::vector<std::size_t> spatial_bins,
                             std::optional<std::vector<double>> power_edges,
                             std::optional<std::vector<double>> sinr_edges_above_floor) {
  PartitionSpec p;
  p.window = config.window;
  p.spatial_bins = std::move(spatial_bins);
  if (!power_edges) {
    power_edges.emplace();
    for (double q : {0.25, 0.5, 0.75}) power_edges->push_back(-std::log1p(-q) / config.power_rate);
  }
  p.power_edges = std::move(*power_edges);
  const double tau = config.sinr_floor();
  if (!sinr_edges_above_floor) {
    sinr_edges_above_floor.emplace();
    const double base = tau > 0.0 ? tau : 0.5;
    for (double m : {2.0, 4.0, 8.0, 16.0}) sinr_edges_above_floor->push_back(base * m);
  }
  p.sinr_edges.push_back(tau);
  for (double e : *sinr_edges_above_floor) {
    if (!(e > tau)) {
      throw ConfigError("partition.sinr_edges: every edge must exceed the floor tau = " +
                        std::to_string(tau));
    }
    p.sinr_edges.push_back(e);
  }
  p.validate();
  return p;
}

BinnedMeasure::BinnedMeasure(Support support, std::size_t cells)
    : support_(support),
      cells_(cells),
      weights_(support == Support::cells ? cells : cells * cells, 0.0) {}

BinnedMeasure BinnedMeasure::from_weights(Support support, std::size_t cells,
                                          std::vector<double> weights) {
  BinnedMeasure m(support, cells);
  if (weights.size() != m.weights_.size()) {
    throw std::invalid_argument("BinnedMeasure: weight count does not match the partition");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("BinnedMeasure: weights must be finite and >= 0");
    }
  }
  m.weights_ = std::move(weights);
  m.refresh_mass();
  return m;
}

BinnedMeasure BinnedMeasure::from_counts(Support support, std::size_t cells,
                                         std::vector<std::uint64_t> counts, double divisor) {
  BinnedMeasure m(support, cells);
  if (counts.size() != m.weights_.size()) {
    throw std::invalid_argument("BinnedMeasure: count vector does not match the partition");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    m.weights_[i] = static_cast<double>(counts[i]) / divisor;
  }
  m.counts_ = std::move(counts);
  m.divisor_ = divisor;
  m.counted_ = true;
  m.refresh_mass();
  return m;
}

bool BinnedMeasure::symmetric() const {
  if (support_ != Support::cell_pairs) return false;
  for (std::size_t a = 0; a < cells_; ++a) {
    for (std::size_t b = a + 1; b < cells_; ++b) {
      if (at(a, b) != at(b, a)) return false;
    }
  }
  return true;
}

void BinnedMeasure::set(std::size_t i, double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument("BinnedMeasure: weights must be finite and >= 0");
  }
  weights_[i] = w;
  counts_.clear();
  counted_ = false;
  divisor_ = 0.0;
  refresh_mass();
}

BinnedMeasure BinnedMeasure::scaled(double factor) const {
  std::vector<double> w(weights_.begin(), weights_.end());
  for (double& v : w) v *= factor;
  return from_weights(support_, cells_, std::move(w));
}

void BinnedMeasure::refresh_mass() {
  mass_ = 0.0;
  for (double w : weights_) mass_ += w;
}

SinrProfile::SinrProfile(std::size_t cells, std::size_t bins)
    : cells_(cells), bins_(bins), values_(cells * bins, 0.0), present_(cells, 0) {}

SinrProfile SinrProfile::from_counts(std::size_t cells, std::size_t bins,
                                     std::vector<std::uint64_t> counts) {
  SinrProfile p(cells, bins);
  if (counts.size() != cells * bins) {
    throw std::invalid_argument("SinrProfile: count vector does not match the partition");
  }
  for (std::size_t c = 0; c < cells; ++c) {
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < bins; ++k) total += counts[c * bins + k];
    if (total == 0) continue;
    p.present_[c] = 1;
    for (std::size_t k = 0; k < bins; ++k) {
      p.values_[c * bins + k] =
          static_cast<double>(counts[c * bins + k]) / static_cast<double>(total);
    }
  }
  p.counts_ = std::move(counts);
  return p;
}

void SinrProfile::set_row(std::size_t cell, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    mark_empty(cell);
    return;
  }
  present_[cell] = 1;
  for (std::size_t k = 0; k < bins_; ++k) values_[cell * bins_ + k] = weights[k] / total;
  counts_.clear();
}

void SinrProfile::mark_empty(std::size_t cell) {
  present_[cell] = 0;
  for (std::size_t k = 0; k < bins_; ++k) values_[cell * bins_ + k] = 0.0;
  counts_.clear();
}

std::uint64_t SinrProfile::row_count(std::size_t cell) const {
  std::uint64_t total = 0;
  if (counts_.empty()) return 0;
  for (std::size_t k = 0; k < bins_; ++k) total += counts_[cell * bins_ + k];
  return total;
}

}  // namespace sinrldp
