#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sinrldp/config.hpp"
#include "sinrldp/geometry.hpp"

namespace sinrldp {

/// Finite partition of D x (0, inf) and of the SINR axis.
///
/// Spatial cells are congruent boxes, flattened with axis 0 fastest. Power bins are
/// [0, e_0), [e_0, e_1), ..., [e_last, inf). A cell of D x (0, inf) has index
/// spatial * power_bins() + power. SINR bins are [0, s_0), [s_0, s_1), ...,
/// [s_last, inf) where s_0 is the floor tau; the first bin collects values below tau.
struct PartitionSpec {
  Box window;
  std::vector<std::size_t> spatial_bins;
  std::vector<double> power_edges;
  std::vector<double> sinr_edges;

  std::size_t spatial_cells() const;
  std::size_t power_bins() const { return power_edges.size() + 1; }
  std::size_t cells() const { return spatial_cells() * power_bins(); }
  std::size_t sinr_bins() const { return sinr_edges.size() + 1; }

  std::size_t spatial_index(std::span<const double> x) const;
  std::size_t power_index(double rho) const;
  std::size_t cell_index(std::span<const double> x, double rho) const {
    return spatial_index(x) * power_bins() + power_index(rho);
  }
  std::size_t sinr_index(double value) const;

  std::size_t cell_spatial(std::size_t cell) const { return cell / power_bins(); }
  std::size_t cell_power(std::size_t cell) const { return cell % power_bins(); }
  Box spatial_box(std::size_t s) const;
  double power_lo(std::size_t p) const { return p == 0 ? 0.0 : power_edges[p - 1]; }
  double power_hi(std::size_t p) const;

  void validate() const;
  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

/// Builds a partition for `config`. Absent `power_edges` selects the Exponential(c)
/// quartiles; absent `sinr_edges_above_floor` selects tau * {2, 4, 8, 16} (or
/// {1, 2, 4, 8} when tau = 0). An explicitly empty list gives a single bin.
PartitionSpec make_partition(const ModelConfig& config, std::vector<std::size_t> spatial_bins,
                             std::optional<std::vector<double>> power_edges = std::nullopt,
                             std::optional<std::vector<double>> sinr_edges_above_floor =
                                 std::nullopt);

/// Partition as requested in a configuration file; resolved against a model config
/// because the SINR floor depends on lambda under log-over-lambda scaling.
struct PartitionRequest {
  std::vector<std::size_t> spatial_bins;
  std::optional<std::vector<double>> power_edges;
  std::optional<std::vector<double>> sinr_edges;

  PartitionSpec resolve(const ModelConfig& config) const {
    return make_partition(config, spatial_bins, power_edges, sinr_edges);
  }
};

/// Nonnegative weights on cells, or on ordered cell pairs (row-major, A * cells + B).
/// Counted instances also carry the integer counts and the divisor they were
/// normalized by, so re-binning is exact.
class BinnedMeasure {
 public:
  enum class Support { cells, cell_pairs };

  BinnedMeasure() = default;
  BinnedMeasure(Support support, std::size_t cells);
  static BinnedMeasure from_weights(Support support, std::size_t cells,
                                    std::vector<double> weights);
  static BinnedMeasure from_counts(Support support, std::size_t cells,
                                   std::vector<std::uint64_t> counts, double divisor);

  Support support() const { return support_; }
  std::size_t cells() const { return cells_; }
  std::size_t size() const { return weights_.size(); }
  bool counted() const { return counted_; }
  double divisor() const { return divisor_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }
  double at(std::size_t a, std::size_t b) const { return weights_[a * cells_ + b]; }
  double mass() const { return mass_; }
  bool symmetric() const;

  void set(std::size_t i, double w);
  BinnedMeasure scaled(double factor) const;

  friend bool operator==(const BinnedMeasure&, const BinnedMeasure&) = default;

 private:
  void refresh_mass();

  Support support_ = Support::cells;
  std::size_t cells_ = 0;
  std::vector<double> weights_;
  std::vector<std::uint64_t> counts_;
  double divisor_ = 0.0;
  double mass_ = 0.0;
  bool counted_ = false;
};

/// Per-cell SINR histograms. Rows without data are marked empty.
class SinrProfile {
 public:
  SinrProfile() = default;
  SinrProfile(std::size_t cells, std::size_t bins);
  static SinrProfile from_counts(std::size_t cells, std::size_t bins,
                                 std::vector<std::uint64_t> counts);

  std::size_t cells() const { return cells_; }
  std::size_t bins() const { return bins_; }
  bool empty(std::size_t cell) const { return !present_[cell]; }
  std::span<const double> row(std::size_t cell) const {
    return {values_.data() + cell * bins_, bins_};
  }
  /// Sets a row to the normalization of `weights`; a zero row is marked empty.
  void set_row(std::size_t cell, std::span<const double> weights);
  void mark_empty(std::size_t cell);

  bool counted() const { return !counts_.empty(); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t row_count(std::size_t cell) const;

  friend bool operator==(const SinrProfile&, const SinrProfile&) = default;

 private:
  std::size_t cells_ = 0;
  std::size_t bins_ = 0;
  std::vector<double> values_;
  std::vector<char> present_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace sinrldp
