#include "sinrldp/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sinrldp {

namespace {

std::size_t axis_bin(double x, double lo, double hi, std::size_t n) {
  const double t = (x - lo) / (hi - lo) * static_cast<double>(n);
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), n - 1);
}

std::size_t power_bin(const std::vector<double>& edges, double rho) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), rho) -
                                  edges.begin());
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_edges(const std::vector<double>& edges, const std::string& key) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    require(std::isfinite(edges[i]) && edges[i] > 0.0, key + ": edges must be finite and > 0");
    if (i > 0) require(edges[i] > edges[i - 1], key + ": edges must be strictly increasing");
  }
}

void check_grid(const GridField& g, std::size_t dim, const std::string& key) {
  require(g.bins.size() == dim, key + ".bins: one count per axis required");
  for (std::size_t b : g.bins) require(b >= 1, key + ".bins: counts must be >= 1");
  require(g.values.size() == g.cell_count(),
          key + ".values: expected " + std::to_string(g.cell_count()) + " entries");
  for (double v : g.values) require(std::isfinite(v) && v >= 0.0, key + ".values: must be >= 0");
}

}  // namespace

std::size_t GridField::cell_count() const {
  std::size_t n = 1;
  for (std::size_t b : bins) n *= b;
  return n;
}

std::size_t GridField::cell_index(const Box& window, std::span<const double> x) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (std::size_t a = 0; a < bins.size(); ++a) {
    idx += stride * axis_bin(x[a], window.lo[a], window.hi[a], bins[a]);
    stride *= bins[a];
  }
  return idx;
}

Box GridField::cell_box(const Box& window, std::size_t index) const {
  Box b = window;
  for (std::size_t a = 0; a < bins.size(); ++a) {
    const std::size_t k = index % bins[a];
    index /= bins[a];
    const double w = window.width(a) / static_cast<double>(bins[a]);
    b.lo[a] = window.lo[a] + w * static_cast<double>(k);
    b.hi[a] = (k + 1 == bins[a]) ? window.hi[a] : window.lo[a] + w * static_cast<double>(k + 1);
  }
  return b;
}

double PiecewiseConstant1D::at(double x) const { return values[power_bin(edges, x)]; }

std::vector<EtaDensity::Piece> EtaDensity::pieces(const Box& window) const {
  if (kind == EtaKind::uniform) return {{window, mass / window.volume()}};
  std::vector<Piece> out;
  out.reserve(grid.cell_count());
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    out.push_back({grid.cell_box(window, i), grid.values[i]});
  }
  return out;
}

double EtaDensity::total_mass(const Box& window) const {
  double m = 0.0;
  for (const Piece& p : pieces(window)) m += p.density * p.box.volume();
  return m;
}

double EtaDensity::mass_in(const Box& window, const Box& region) const {
  double m = 0.0;
  for (const Piece& p : pieces(window)) {
    const Box overlap = intersect(p.box, region);
    if (!overlap.empty()) m += p.density * overlap.volume();
  }
  return m;
}

double EtaDensity::at(const Box& window, std::span<const double> x) const {
  if (kind == EtaKind::uniform) return mass / window.volume();
  return grid.at(window, x);
}

double HStar::operator()(const Box& window, std::span<const double> x, double rho_x,
                         std::span<const double> y, double rho_y) const {
  switch (kind) {
    case HStarKind::constant:
      return value;
    case HStarKind::product: {
      double v = 1.0;
      if (f) v *= f->at(window, x) * f->at(window, y);
      if (g) v *= g->at(rho_x) * g->at(rho_y);
      return v;
    }
    case HStarKind::tabulated: {
      const GridField sp{spatial_bins, {}};
      const std::size_t np = power_edges.size() + 1;
      const std::size_t a = sp.cell_index(window, x) * np + power_bin(power_edges, rho_x);
      const std::size_t b = sp.cell_index(window, y) * np + power_bin(power_edges, rho_y);
      return table[a * (sp.cell_count() * np) + b];
    }
  }
  return 0.0;
}

std::vector<std::vector<double>> HStar::spatial_breaks(const Box& window) const {
  std::vector<std::vector<double>> out(window.dim());
  const std::vector<std::size_t>* bins = nullptr;
  if (kind == HStarKind::product && f) bins = &f->bins;
  if (kind == HStarKind::tabulated) bins = &spatial_bins;
  if (bins == nullptr) return out;
  for (std::size_t a = 0; a < window.dim(); ++a) {
    const std::size_t n = (*bins)[a];
    for (std::size_t k = 1; k < n; ++k) {
      out[a].push_back(window.lo[a] + window.width(a) * static_cast<double>(k) /
                                          static_cast<double>(n));
    }
  }
  return out;
}

std::vector<double> HStar::power_breaks() const {
  if (kind == HStarKind::product && g) return g->edges;
  if (kind == HStarKind::tabulated) return power_edges;
  return {};
}

std::string to_string(ThresholdScaling v) {
  return v == ThresholdScaling::fixed ? "fixed" : "log-over-lambda";
}
std::string to_string(ThresholdIndexing v) { return v == ThresholdIndexing::far ? "far" : "near"; }
std::string to_string(ScalingRegime v) {
  switch (v) {
    case ScalingRegime::critical:
      return "critical";
    case ScalingRegime::subcritical:
      return "subcritical";
    case ScalingRegime::supercritical:
      return "supercritical";
  }
  return "critical";
}
std::string to_string(EdgeMode v) { return v == EdgeMode::physical ? "physical" : "limit"; }

void ModelConfig::validate() const {
  require(dimension >= 1, "dimension >= 1");
  require(window.dim() == dimension, "window: one [lo, hi] interval per dimension required");
  for (std::size_t a = 0; a < dimension; ++a) {
    require(std::isfinite(window.lo[a]) && std::isfinite(window.hi[a]) &&
                window.hi[a] > window.lo[a],
            "window: each axis needs finite lo < hi");
  }
  require(std::isfinite(lambda) && lambda > 0.0, "lambda > 0");
  require(std::isfinite(power_rate) && power_rate > 0.0, "power_rate > 0");
  require(std::isfinite(path_loss_exponent) && path_loss_exponent > 0.0,
          "path_loss_exponent > 0");
  require(std::isfinite(noise) && noise >= 0.0, "noise >= 0");
  require(std::isfinite(tau_base) && tau_base >= 0.0, "tau_base >= 0");
  require(std::isfinite(gamma_base) && gamma_base > 0.0, "gamma_base > 0");
  require(std::isfinite(tau_power_exponent), "tau_power_exponent must be finite");
  if (threshold_scaling == ThresholdScaling::log_over_lambda) {
    require(lambda > 1.0, "lambda > 1 (threshold_scaling log-over-lambda)");
  }
  if (eta.kind == EtaKind::uniform) {
    require(std::isfinite(eta.mass) && eta.mass > 0.0, "eta.mass > 0");
  } else {
    check_grid(eta.grid, dimension, "eta");
  }
  const double m = eta_mass();
  require(m > 0.0 && m <= 1.0 + 1e-12, "eta total mass in (0, 1]");
  if (sinr_reference_power) {
    require(std::isfinite(*sinr_reference_power) && *sinr_reference_power > 0.0,
            "sinr_reference_power > 0");
  }
  if (edge_mode == EdgeMode::limit) {
    require(h_star.has_value(), "h_star required when edge_mode is limit");
  }
  if (h_star) {
    const HStar& h = *h_star;
    switch (h.kind) {
      case HStarKind::constant:
        require(std::isfinite(h.value) && h.value >= 0.0, "h_star.value >= 0");
        break;
      case HStarKind::product:
        if (h.f) check_grid(*h.f, dimension, "h_star.f");
        if (h.g) {
          check_edges(h.g->edges, "h_star.g");
          require(h.g->values.size() == h.g->edges.size() + 1,
                  "h_star.g.values: expected one more entry than edges");
          for (double v : h.g->values) {
            require(std::isfinite(v) && v >= 0.0, "h_star.g.values: must be >= 0");
          }
        }
        break;
      case HStarKind::tabulated: {
        require(h.spatial_bins.size() == dimension, "h_star.spatial_bins: one count per axis");
        for (std::size_t b : h.spatial_bins) require(b >= 1, "h_star.spatial_bins >= 1");
        check_edges(h.power_edges, "h_star.power_edges");
        std::size_t k = h.power_edges.size() + 1;
        for (std::size_t b : h.spatial_bins) k *= b;
        require(h.table.size() == k * k,
                "h_star.table: expected " + std::to_string(k * k) + " entries");
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            const double v = h.table[i * k + j];
            require(std::isfinite(v) && v >= 0.0, "h_star.table: entries must be >= 0");
            require(v == h.table[j * k + i], "h_star.table: must be symmetric");
          }
        }
        break;
      }
    }
  }
}

double ModelConfig::threshold_scale() const {
  if (threshold_scaling == ThresholdScaling::fixed) return 1.0;
  return std::log(lambda) / lambda;
}

double ModelConfig::tau(double rho) const {
  const double base = tau_base * threshold_scale();
  if (tau_power_exponent == 0.0) return base;
  return base * std::pow(rho, tau_power_exponent);
}

double ModelConfig::gamma(double) const { return gamma_base; }

double ModelConfig::a_lambda() const {
  switch (scaling_regime) {
    case ScalingRegime::critical:
      return 1.0 / lambda;
    case ScalingRegime::subcritical:
      return std::pow(lambda, -1.5);
    case ScalingRegime::supercritical:
      return std::pow(lambda, -0.5);
  }
  return 1.0 / lambda;
}

double ModelConfig::limit_edge_probability(double h) const {
  return std::min(1.0, h / (lambda * lambda * a_lambda()));
}

double ModelConfig::reference_power() const {
  return sinr_reference_power ? *sinr_reference_power : 1.0 / power_rate;
}

ModelConfig ModelConfig::with_lambda(double l) const {
  ModelConfig c = *this;
  c.lambda = l;
  return c;
}

}  // namespace sinrldp
