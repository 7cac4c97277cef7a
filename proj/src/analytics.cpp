#include "sinrldp/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sinrldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_convergent_radial(const ModelConfig& config) {
  if (!(config.path_loss_exponent < static_cast<double>(config.dimension))) {
    throw ConfigError(
        "radial integral diverges: path_loss_exponent < dimension required for the "
        "interference field");
  }
}

// Integral of (a^2 + t^2)^{-ell/2} over t in [0, b], via t = a sinh(u).
double face_integral_1d(double a, double b, double ell) {
  const double upper = std::asinh(b / a);
  const auto& g = numerics::gauss_legendre(10);
  const int pieces = std::max(1, static_cast<int>(std::ceil(upper)));
  const double h = upper / pieces;
  double s = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double mid = (k + 0.5) * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double u = mid + 0.5 * h * g.nodes[i];
      s += g.weights[i] * std::pow(std::cosh(u), 1.0 - ell);
    }
  }
  return 0.5 * h * s * std::pow(a, 1.0 - ell);
}

// Integral of |p|^{-ell} over the corner box [0, a_0] x ... x [0, a_{d-1}], all a_i > 0.
// Uses div(p |p|^{-ell}) = (d - ell) |p|^{-ell}; only the faces p_i = a_i contribute.
double corner_integral(const std::vector<double>& a, double ell) {
  const std::size_t d = a.size();
  const double k = static_cast<double>(d) - ell;
  if (d == 1) return std::pow(a[0], 1.0 - ell) / k;
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double face;
    if (d == 2) {
      face = face_integral_1d(a[i], a[1 - i], ell);
    } else {
      Box box;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        box.lo.push_back(0.0);
        box.hi.push_back(a[j]);
      }
      const double ai2 = a[i] * a[i];
      numerics::AdaptiveOptions opts;
      opts.rel_tol = 1e-11;
      opts.max_depth = 40;
      opts.rule_points = 4;
      face = numerics::integrate_adaptive(
                 [&](std::span<const double> p) {
                   double r2 = ai2;
                   for (double v : p) r2 += v * v;
                   return std::pow(r2, -0.5 * ell);
                 },
                 box, opts)
                 .value;
    }
    total += a[i] * face;
  }
  return total / k;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::vector<Box> split_pieces(const std::vector<EtaDensity::Piece>& pieces,
                              const std::vector<std::vector<double>>& breaks) {
  std::vector<Box> out;
  for (const auto& p : pieces) {
    if (p.density <= 0.0) continue;
    for (Box& b : split_box(p.box, breaks)) out.push_back(std::move(b));
  }
  return out;
}

// Survival integral  int_L^inf c e^{-c rho} h(rho) d rho  for h piecewise constant
// between `breaks`; `h_at` is evaluated inside each segment.
template <class H>
double power_tail(double lower, double c, const std::vector<double>& breaks, H&& h_at) {
  double total = 0.0;
  double seg_lo = 0.0;
  for (std::size_t k = 0; k <= breaks.size(); ++k) {
    const double seg_hi = k < breaks.size() ? breaks[k] : kInf;
    if (seg_hi > lower) {
      const double from = std::max(lower, seg_lo);
      const double probe = std::isfinite(seg_hi) ? 0.5 * (seg_lo + seg_hi) : seg_lo + 1.0;
      const double hv = h_at(probe);
      if (hv != 0.0) {
        const double upper = std::isfinite(seg_hi) ? std::exp(-c * seg_hi) : 0.0;
        total += hv * (std::exp(-c * from) - upper);
      }
    }
    seg_lo = seg_hi;
  }
  return total;
}

class TypicalLaw {
 public:
  TypicalLaw(const ModelConfig& config, std::span<const double> x, double rho_x)
      : config_(config), x_(x.begin(), x.end()), rho_x_(rho_x) {
    require_convergent_radial(config);
    if (!config.h_star) throw ConfigError("h_star required for the typical SINR measure");
    const double r = eta_radial_integral(config, x);
    denominator_ = config.noise + config.gamma(rho_x) * r / config.power_rate;
    auto breaks = config.h_star->spatial_breaks(config.window);
    for (std::size_t a = 0; a < x_.size(); ++a) breaks[a].push_back(x_[a]);
    pieces_ = split_pieces(config.eta.pieces(config.window), breaks);
    power_breaks_ = config.h_star->power_breaks();
  }

  // Integral over y and rho of 1{SINR >= a} c e^{-c rho} h* eta(dy).
  double survival_mass(double a) const {
    if (pieces_.empty()) return 0.0;
    const double c = config_.power_rate;
    const double ell = config_.path_loss_exponent;
    const HStar& h = *config_.h_star;
    numerics::AdaptiveOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-300;
    opts.max_depth = 30;
    auto integrand = [&](std::span<const double> y) {
      const double rl = std::pow(squared_distance(x_, y), 0.5 * ell);
      const double lower = a * denominator_ * rl;
      const double tail = power_tail(lower, c, power_breaks_, [&](double rho) {
        return h(config_.window, x_, rho_x_, y, rho);
      });
      return tail * config_.eta.at(config_.window, y);
    };
    return numerics::integrate_adaptive(integrand, pieces_, opts).value;
  }

 private:
  const ModelConfig& config_;
  std::vector<double> x_;
  double rho_x_;
  double denominator_ = 0.0;
  std::vector<Box> pieces_;
  std::vector<double> power_breaks_;
};

}  // namespace

BinnedMeasure reference_power_measure(const ModelConfig& config, const PartitionSpec& part) {
  std::vector<double> w(part.cells(), 0.0);
  const double c = config.power_rate;
  for (std::size_t s = 0; s < part.spatial_cells(); ++s) {
    const double eta_s = config.eta.mass_in(config.window, part.spatial_box(s));
    for (std::size_t p = 0; p < part.power_bins(); ++p) {
      const double lo = part.power_lo(p);
      const double hi = part.power_hi(p);
      // e^{-c lo} - e^{-c hi} = e^{-c lo} (1 - e^{-c (hi - lo)})
      const double q = std::isfinite(hi) ? std::exp(-c * lo) * -std::expm1(-c * (hi - lo))
                                         : std::exp(-c * lo);
      w[s * part.power_bins() + p] = eta_s * q;
    }
  }
  return BinnedMeasure::from_weights(BinnedMeasure::Support::cells, part.cells(), std::move(w));
}

double representative_power(const ModelConfig& config, const PartitionSpec& part, std::size_t p) {
  const double c = config.power_rate;
  const double lo = part.power_lo(p);
  const double hi = part.power_hi(p);
  if (!std::isfinite(hi)) return lo + 1.0 / c;
  const double width = hi - lo;
  return lo + 1.0 / c - width / std::expm1(c * width);
}

std::vector<double> hstar_cell_matrix(const ModelConfig& config, const PartitionSpec& part) {
  if (!config.h_star) throw ConfigError("h_star required");
  const std::size_t k = part.cells();
  std::vector<double> out(k * k, 0.0);
  std::vector<std::vector<double>> centers(part.spatial_cells());
  for (std::size_t s = 0; s < part.spatial_cells(); ++s) centers[s] = part.spatial_box(s).center();
  std::vector<double> rho(part.power_bins());
  for (std::size_t p = 0; p < part.power_bins(); ++p) rho[p] = representative_power(config, part, p);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      out[a * k + b] = (*config.h_star)(config.window, centers[part.cell_spatial(a)],
                                        rho[part.cell_power(a)], centers[part.cell_spatial(b)],
                                        rho[part.cell_power(b)]);
    }
  }
  return out;
}

BinnedMeasure link_reference_measure(const ModelConfig& config, const PartitionSpec& part,
                                     const BinnedMeasure& sigma) {
  const std::vector<double> h = hstar_cell_matrix(config, part);
  const std::size_t k = part.cells();
  if (sigma.cells() != k || sigma.support() != BinnedMeasure::Support::cells) {
    throw std::invalid_argument("link_reference_measure: partition mismatch");
  }
  std::vector<double> w(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) w[a * k + b] = h[a * k + b] * sigma[a] * sigma[b];
  }
  return BinnedMeasure::from_weights(BinnedMeasure::Support::cell_pairs, k, std::move(w));
}

numerics::QuadResult h_lambda_D(std::span<const double> x, double rho_x,
                                std::span<const double> y, double rho_y,
                                const ModelConfig& config,
                                const numerics::AdaptiveOptions& opts) {
  const double ell = config.path_loss_exponent;
  const double r2 = squared_distance(x, y);
  if (r2 == 0.0) throw std::invalid_argument("h_lambda_D: x and y must differ");
  const double rl = std::pow(r2, 0.5 * ell);
  const double ux = config.threshold_product(rho_x) * rl;
  const double uy = config.threshold_product(rho_y) * rl;
  if (ux == 0.0 && uy == 0.0) return {};

  const std::size_t d = config.dimension;
  std::vector<std::vector<double>> breaks(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (config.recenter_interference) {
      breaks[a] = {x[a], y[a]};
    } else {
      breaks[a] = {0.0};
    }
  }
  const std::vector<Box> pieces = split_pieces(config.eta.pieces(config.window), breaks);
  const bool recenter = config.recenter_interference;
  auto term = [](double u, double zl) {
    const double den = u + zl;
    return den > 0.0 ? u / den : 0.0;
  };
  auto integrand = [&](std::span<const double> z) {
    double zx;
    double zy;
    if (recenter) {
      zy = std::pow(squared_distance(z, y), 0.5 * ell);
      zx = std::pow(squared_distance(z, x), 0.5 * ell);
    } else {
      double n2 = 0.0;
      for (double v : z) n2 += v * v;
      zx = zy = std::pow(n2, 0.5 * ell);
    }
    return (term(ux, zy) + term(uy, zx)) * config.eta.at(config.window, z);
  };
  return numerics::integrate_adaptive(integrand, pieces, opts);
}

double link_probability(std::span<const double> x, double rho_x, std::span<const double> y,
                        double rho_y, const ModelConfig& config) {
  return std::exp(-config.lambda * h_lambda_D(x, rho_x, y, rho_y, config).value);
}

std::vector<HStarDiagnosticRow> h_star_diagnostic(std::span<const double> x, double rho_x,
                                                  std::span<const double> y, double rho_y,
                                                  const ModelConfig& config,
                                                  std::span<const double> lambda_grid) {
  std::vector<HStarDiagnosticRow> out;
  for (double l : lambda_grid) {
    const ModelConfig c = config.with_lambda(l);
    const double h = h_lambda_D(x, rho_x, y, rho_y, c).value;
    const double p = std::exp(-l * h);
    out.push_back({l, h, p, l * l * c.a_lambda() * p});
  }
  return out;
}

double radial_box_integral(const Box& box, std::span<const double> x, double ell) {
  const std::size_t d = box.dim();
  if (!(ell < static_cast<double>(d))) {
    throw ConfigError("radial integral diverges: path_loss_exponent < dimension required");
  }
  if (box.empty()) return 0.0;
  double total = 0.0;
  std::vector<double> corner(d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    double coef = 1.0;
    bool degenerate = false;
    for (std::size_t a = 0; a < d; ++a) {
      const bool upper = mask & (std::size_t{1} << a);
      const double v = upper ? box.hi[a] - x[a] : box.lo[a] - x[a];
      coef *= upper ? sgn(v) : -sgn(v);
      corner[a] = std::abs(v);
      if (v == 0.0) degenerate = true;
    }
    if (degenerate) continue;
    total += coef * corner_integral(corner, ell);
  }
  return total;
}

double eta_radial_integral(const ModelConfig& config, std::span<const double> x) {
  return eta_radial_integral(config, config.window, x);
}

double eta_radial_integral(const ModelConfig& config, const Box& region,
                           std::span<const double> x) {
  double total = 0.0;
  for (const auto& p : config.eta.pieces(config.window)) {
    if (p.density <= 0.0) continue;
    const Box overlap = intersect(p.box, region);
    if (overlap.empty()) continue;
    total += p.density * radial_box_integral(overlap, x, config.path_loss_exponent);
  }
  return total;
}

SinrProfile typical_sinr_measure(const ModelConfig& config, const PartitionSpec& part) {
  require_convergent_radial(config);
  if (!config.h_star) throw ConfigError("h_star required for the typical SINR measure");
  SinrProfile out(part.cells(), part.sinr_bins());
  const std::size_t bins = part.sinr_bins();
  std::vector<double> row(bins);
  for (std::size_t cell = 0; cell < part.cells(); ++cell) {
    const std::vector<double> x = part.spatial_box(part.cell_spatial(cell)).center();
    const TypicalLaw law(config, x, representative_power(config, part, part.cell_power(cell)));
    double previous = law.survival_mass(0.0);
    const double total = previous;
    for (std::size_t k = 0; k + 1 < bins; ++k) {
      const double s = part.sinr_edges[k] > 0.0 ? law.survival_mass(part.sinr_edges[k]) : total;
      row[k] = std::max(0.0, previous - s);
      previous = s;
    }
    row[bins - 1] = previous;
    out.set_row(cell, row);
  }
  return out;
}

double typical_sinr_survival(const ModelConfig& config, std::span<const double> x, double rho_x,
                             double a) {
  const TypicalLaw law(config, x, rho_x);
  const double total = law.survival_mass(0.0);
  if (!(total > 0.0)) return 0.0;
  return law.survival_mass(a) / total;
}

double cumulant_dual(double w, double m) {
  const auto best = numerics::golden_section_maximize(
      [&](double g) { return g * w - std::expm1(g) * m; }, -60.0, 60.0, 1e-12, 500);
  return best.value;
}

}  // namespace sinrldp
