#include <cmath>
#include <limits>
#include <stdexcept>

#include "sinrldp/analytics.hpp"

namespace sinrldp {

namespace {

PhiGeometry::NodeSet cell_nodes(const ModelConfig& config, const Box& cell, std::size_t order) {
  PhiGeometry::NodeSet out;
  double total = 0.0;
  for (const auto& piece : config.eta.pieces(config.window)) {
    if (piece.density <= 0.0) continue;
    const Box overlap = intersect(piece.box, cell);
    if (overlap.empty()) continue;
    const numerics::TensorNodes nodes = numerics::tensor_nodes(overlap, order);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto p = nodes.node(i);
      out.points.emplace_back(p.begin(), p.end());
      out.weights.push_back(nodes.weights[i] * piece.density);
      total += out.weights.back();
    }
  }
  if (!(total > 0.0)) {
    // eta-null cell: fall back to the uniform law on the cell.
    out = {};
    const numerics::TensorNodes nodes = numerics::tensor_nodes(cell, order);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto p = nodes.node(i);
      out.points.emplace_back(p.begin(), p.end());
      out.weights.push_back(nodes.weights[i]);
      total += nodes.weights[i];
    }
  }
  for (double& w : out.weights) w /= total;
  return out;
}

// P(rho >= t) for rho ~ Exponential(c) conditioned on [lo, hi).
double bin_survival(double t, double lo, double hi, double c) {
  if (t <= lo) return 1.0;
  if (!std::isfinite(hi)) return std::exp(-c * (t - lo));
  if (t >= hi) return 0.0;
  const double width = hi - lo;
  return (std::exp(-c * (t - lo)) - std::exp(-c * width)) / -std::expm1(-c * width);
}

}  // namespace

PhiGeometry::PhiGeometry(const ModelConfig& config, const PartitionSpec& part, PhiOptions opts)
    : config_(config), part_(part) {
  if (!(config.path_loss_exponent < static_cast<double>(config.dimension))) {
    throw ConfigError(
        "radial integral diverges: path_loss_exponent < dimension required for the SINR kernel");
  }
  const std::size_t ns = part.spatial_cells();
  for (std::size_t p = 0; p < part.power_bins(); ++p) {
    rho_bar_.push_back(representative_power(config, part, p));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const Box cell = part.spatial_box(s);
    if (opts.rule == PhiRule::cell_center) {
      NodeSet c{{cell.center()}, {1.0}};
      rx_.push_back(c);
      tx_.push_back(c);
    } else {
      rx_.push_back(cell_nodes(config, cell, opts.order));
      tx_.push_back(cell_nodes(config, cell, opts.order + 1));
    }
  }
  std::size_t rx_total = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    rx_offset_.push_back(rx_total);
    rx_total += rx_[s].weights.size();
    tx_offset_.push_back(tx_total_);
    tx_total_ += tx_[s].weights.size();
  }
  const double ell = config.path_loss_exponent;
  dpow_.resize(rx_total * tx_total_);
  gains_.resize(rx_total * ns);
  std::vector<double> eta_cell(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    eta_cell[s] = config.eta.mass_in(config.window, part.spatial_box(s));
  }
  for (std::size_t a = 0; a < ns; ++a) {
    for (std::size_t i = 0; i < rx_[a].points.size(); ++i) {
      const std::vector<double>& x = rx_[a].points[i];
      const std::size_t gi = rx_offset_[a] + i;
      for (std::size_t b = 0; b < ns; ++b) {
        for (std::size_t j = 0; j < tx_[b].points.size(); ++j) {
          dpow_[gi * tx_total_ + tx_offset_[b] + j] =
              std::pow(squared_distance(x, tx_[b].points[j]), 0.5 * ell);
        }
      }
      for (std::size_t s = 0; s < ns; ++s) {
        const Box cell = part.spatial_box(s);
        gains_[gi * ns + s] = eta_cell[s] > 0.0
                                  ? eta_radial_integral(config, cell, x) / eta_cell[s]
                                  : radial_box_integral(cell, x, ell) / cell.volume();
      }
    }
  }
}

double PhiGeometry::distance_pow(std::size_t a, std::size_t i, std::size_t b,
                                 std::size_t j) const {
  return dpow_[(rx_offset_[a] + i) * tx_total_ + tx_offset_[b] + j];
}

double PhiGeometry::cell_gain(std::size_t a, std::size_t i, std::size_t s) const {
  return gains_[(rx_offset_[a] + i) * part_.spatial_cells() + s];
}

PhiWeights::PhiWeights(const PhiGeometry& geo, const BinnedMeasure& sigma) {
  const PartitionSpec& part = geo.partition();
  const ModelConfig& config = geo.config();
  if (sigma.support() != BinnedMeasure::Support::cells || sigma.cells() != part.cells()) {
    throw std::invalid_argument("PhiWeights: partition mismatch");
  }
  const std::size_t ns = part.spatial_cells();
  const std::size_t np = part.power_bins();
  const std::size_t edges = part.sinr_edges.size();
  cells_ = part.cells();
  bins_ = part.sinr_bins();
  phi_.assign(ns * cells_ * bins_, 0.0);

  // Power carried by each spatial cell: sum_p sigma(s, p) * rho_bar_p.
  std::vector<double> cell_power(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t p = 0; p < np; ++p) {
      cell_power[s] += sigma[s * np + p] * geo.representative_powers()[p];
    }
  }
  denom_.assign(ns, {});
  for (std::size_t a = 0; a < ns; ++a) {
    const auto& rx = geo.receivers(a);
    for (std::size_t i = 0; i < rx.weights.size(); ++i) {
      double interference = 0.0;
      for (std::size_t s = 0; s < ns; ++s) interference += geo.cell_gain(a, i, s) * cell_power[s];
      denom_[a].push_back(config.noise + config.gamma_base * interference);
    }
  }

  const double c = config.power_rate;
  std::vector<double> lo(np);
  std::vector<double> hi(np);
  for (std::size_t p = 0; p < np; ++p) {
    lo[p] = part.power_lo(p);
    hi[p] = part.power_hi(p);
  }
  std::vector<double> surv(np * edges);
  for (std::size_t a = 0; a < ns; ++a) {
    const auto& rx = geo.receivers(a);
    for (std::size_t sb = 0; sb < ns; ++sb) {
      const auto& tx = geo.transmitters(sb);
      std::fill(surv.begin(), surv.end(), 0.0);
      for (std::size_t i = 0; i < rx.weights.size(); ++i) {
        const double k_x = denom_[a][i];
        for (std::size_t j = 0; j < tx.weights.size(); ++j) {
          const double w = rx.weights[i] * tx.weights[j];
          const double base = k_x * geo.distance_pow(a, i, sb, j);
          for (std::size_t e = 0; e < edges; ++e) {
            const double t = part.sinr_edges[e] * base;
            for (std::size_t p = 0; p < np; ++p) {
              surv[p * edges + e] += w * bin_survival(t, lo[p], hi[p], c);
            }
          }
        }
      }
      for (std::size_t p = 0; p < np; ++p) {
        double* out = phi_.data() + (a * cells_ + sb * np + p) * bins_;
        const double* s = surv.data() + p * edges;
        out[0] = 1.0 - s[0];
        for (std::size_t e = 1; e < edges; ++e) out[e] = s[e - 1] - s[e];
        out[edges] = s[edges - 1];
        for (std::size_t k = 0; k < bins_; ++k) out[k] = std::max(0.0, out[k]);
      }
    }
  }
}

SinrProfile kernel_profile(const PhiWeights& phi, const BinnedMeasure& omega,
                           const PartitionSpec& part) {
  const std::size_t k = part.cells();
  if (omega.support() != BinnedMeasure::Support::cell_pairs || omega.cells() != k) {
    throw std::invalid_argument("kernel_profile: partition mismatch");
  }
  SinrProfile out(k, part.sinr_bins());
  std::vector<double> row(part.sinr_bins());
  for (std::size_t a = 0; a < k; ++a) {
    std::fill(row.begin(), row.end(), 0.0);
    double marginal = 0.0;
    const std::size_t sa = part.cell_spatial(a);
    for (std::size_t b = 0; b < k; ++b) {
      const double w = omega.at(b, a);
      if (w == 0.0) continue;
      marginal += w;
      const auto ph = phi.weights(sa, b);
      for (std::size_t e = 0; e < row.size(); ++e) row[e] += w * ph[e];
    }
    if (marginal > 0.0) {
      out.set_row(a, row);
    } else {
      out.mark_empty(a);
    }
  }
  return out;
}

std::optional<double> phi_kernel(std::size_t cell, std::size_t sinr_bin,
                                 const BinnedMeasure& sigma, const BinnedMeasure& omega,
                                 const ModelConfig& config, const PartitionSpec& part,
                                 PhiOptions opts) {
  const PhiGeometry geo(config, part, opts);
  const SinrProfile prof = kernel_profile(PhiWeights(geo, sigma), omega, part);
  if (prof.empty(cell)) return std::nullopt;
  return prof.row(cell)[sinr_bin];
}

}  // namespace sinrldp
