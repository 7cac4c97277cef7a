#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sinrldp/analytics.hpp"

using namespace sinrldp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelConfig limit_config(double lambda, double h) {
  ModelConfig c;
  c.lambda = lambda;
  c.edge_mode = EdgeMode::limit;
  HStar hs;
  hs.value = h;
  c.h_star = hs;
  return c;
}

BinnedMeasure cells_measure(std::vector<double> w) {
  const std::size_t n = w.size();
  return BinnedMeasure::from_weights(BinnedMeasure::Support::cells, n, std::move(w));
}

// Integral of 1/|z| over [0,a] x [0,b].
double corner_closed_form(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * std::asinh(b / a) + b * std::asinh(a / b);
}

// Signed corner decomposition of the closed form over an arbitrary rectangle.
double radial_closed_form(const Box& box, double x0, double x1) {
  auto g = [](double u, double v) {
    const double s = (u < 0) != (v < 0) ? -1.0 : 1.0;
    return s * corner_closed_form(std::abs(u), std::abs(v));
  };
  const double u0 = box.lo[0] - x0, u1 = box.hi[0] - x0;
  const double v0 = box.lo[1] - x1, v1 = box.hi[1] - x1;
  return g(u1, v1) - g(u0, v1) - g(u1, v0) + g(u0, v0);
}

// Midpoint rule for h_lambda_D on the unit square with uniform eta.
double h_riemann(const ModelConfig& c, double x0, double x1, double y0, double y1, int n) {
  const double ell = c.path_loss_exponent;
  const double r = std::hypot(x0 - y0, x1 - y1);
  const double rl = std::pow(r, ell);
  const double ux = c.threshold_product(1.0);
  const double uy = ux;
  const double density = c.eta.mass;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z0 = (i + 0.5) / n;
    for (int j = 0; j < n; ++j) {
      const double z1 = (j + 0.5) / n;
      double dy, dx;
      if (c.recenter_interference) {
        dy = std::pow(std::hypot(z0 - y0, z1 - y1), ell);
        dx = std::pow(std::hypot(z0 - x0, z1 - x1), ell);
      } else {
        dx = dy = std::pow(std::hypot(z0, z1), ell);
      }
      sum += ux / (ux + dy / rl) + uy / (uy + dx / rl);
    }
  }
  return sum * density / (static_cast<double>(n) * n);
}

// P(rho >= t | rho in [lo, hi)) for rho ~ Exponential(c).
double bin_tail(double t, double lo, double hi, double c) {
  const double z = std::exp(-c * lo) - std::exp(-c * hi);
  const double from = std::max(t, lo);
  if (from >= hi) return 0.0;
  return (std::exp(-c * from) - std::exp(-c * hi)) / z;
}

}  // namespace

TEST_CASE("relative entropy examples") {
  const std::vector<double> s{0.5, 0.5};
  const std::vector<double> m{0.25, 0.75};
  CHECK(rel_entropy(s, m) == doctest::Approx(0.143841).epsilon(1e-5));
  CHECK(rel_entropy(s, s) == 0.0);
  CHECK(rel_entropy(s, std::vector<double>{1.0, 0.0}) == kInf);
  CHECK(rel_entropy(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)));
}

TEST_CASE("unnormalised relative entropy examples") {
  const std::vector<double> w{1.0, 1.0};
  const std::vector<double> m{2.0, 2.0};
  CHECK(rel_entropy_unnorm(w, m) == doctest::Approx(0.613706).epsilon(1e-5));
  CHECK(rel_entropy_unnorm(m, m) == 0.0);
  CHECK(rel_entropy_unnorm(std::vector<double>{0.0, 0.0}, m) == kInf);
  CHECK(rel_entropy_unnorm(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 0.0}) == kInf);
  // omega = 0 on a cell contributes m there.
  CHECK(rel_entropy_unnorm(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 3.0}) ==
        doctest::Approx(3.0));
}

TEST_CASE("relative entropy is nonnegative near equality") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(6), b(6);
    double sa = 0, sb = 0;
    for (int i = 0; i < 6; ++i) {
      a[i] = u(gen);
      b[i] = a[i] * (1.0 + 1e-9 * (u(gen) - 0.5));
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 6; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    CHECK(rel_entropy(a, b) >= 0.0);
    CHECK(rel_entropy_unnorm(a, b) >= 0.0);
  }
}

TEST_CASE("cumulant dual matches the closed form") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int t = 0; t < 100; ++t) {
    const double w = u(gen);
    const double m = u(gen);
    CHECK(cumulant_dual(w, m) == doctest::Approx(w * std::log(w / m) - w + m).epsilon(1e-8));
  }
}

TEST_CASE("I1 cases") {
  const ModelConfig c = limit_config(100, 2.0);
  const PartitionSpec part = make_partition(c, {2, 2});
  const RateEvaluator ev(c, part);
  const BinnedMeasure ref = ev.reference();
  CHECK(ref.mass() == doctest::Approx(1.0));
  CHECK(ev.I1(ref).total == 0.0);

  const RateReport short_mass = ev.I1(ref.scaled(0.9));
  CHECK(short_mass.infinite);
  CHECK(short_mass.infinite_component == "power");
  CHECK(std::isinf(short_mass.total));

  std::vector<double> w(ref.weights().begin(), ref.weights().end());
  w[0] += 0.05;
  w[5] -= 0.05;
  const BinnedMeasure tilted = cells_measure(w);
  CHECK(ev.I1(tilted).total == doctest::Approx(rel_entropy(tilted, ref)));
  CHECK(ev.I1(tilted).total > 0.0);
  CHECK(rate_I1(tilted, c, part).total == doctest::Approx(ev.I1(tilted).total));
}

TEST_CASE("I_sigma cases") {
  const ModelConfig c = limit_config(100, 2.0);
  const PartitionSpec part = make_partition(c, {2, 1}, std::vector<double>{1.0});
  const RateEvaluator ev(c, part);
  const BinnedMeasure sigma = ev.reference();
  const BinnedMeasure m = ev.link_reference(sigma);
  CHECK(m.mass() == doctest::Approx(2.0));
  CHECK(ev.I_sigma(m, sigma).total == 0.0);
  CHECK(ev.I_sigma(m.scaled(2.0), sigma).total ==
        doctest::Approx(0.5 * m.mass() * (2.0 * std::log(2.0) - 1.0)));

  // omega charging a pair whose cell sigma does not charge.
  std::vector<double> sw(sigma.weights().begin(), sigma.weights().end());
  sw[0] += sw[1];
  sw[1] = 0.0;
  const BinnedMeasure lopsided = cells_measure(sw);
  const RateReport r = ev.I_sigma(m, lopsided);
  CHECK(r.infinite);
  CHECK(r.infinite_component == "link");
}

TEST_CASE("I is the sum of its parts") {
  const ModelConfig c = limit_config(100, 1.5);
  const PartitionSpec part = make_partition(c, {2, 2}, std::vector<double>{0.7});
  const RateEvaluator ev(c, part);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> sw(part.cells());
    double s = 0;
    for (double& v : sw) s += (v = u(gen));
    for (double& v : sw) v /= s;
    const BinnedMeasure sigma = cells_measure(sw);
    std::vector<double> ow(part.cells() * part.cells());
    for (std::size_t a = 0; a < part.cells(); ++a) {
      for (std::size_t b = a; b < part.cells(); ++b) {
        ow[a * part.cells() + b] = ow[b * part.cells() + a] = u(gen);
      }
    }
    const BinnedMeasure omega =
        BinnedMeasure::from_weights(BinnedMeasure::Support::cell_pairs, part.cells(), ow);
    const RateReport r = ev.I(sigma, omega);
    CHECK(r.total == doctest::Approx(ev.I1(sigma).total + ev.I_sigma(omega, sigma).total));
    CHECK(r.total >= 0.0);
  }
}

TEST_CASE("J_tilde and J_star on the kernel") {
  ModelConfig c = limit_config(100, 2.0);
  c.noise = 0.1;
  c.tau_base = 0.4;
  const PartitionSpec part = make_partition(c, {2, 2}, std::vector<double>{1.0});
  const RateEvaluator ev(c, part);
  const BinnedMeasure sigma = ev.reference();
  const BinnedMeasure omega = ev.link_reference(sigma);
  const SinrProfile k = ev.kernel(sigma, omega);

  CHECK(ev.J_tilde(k, sigma, omega).total == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev.J_star(sigma, omega, k).total == doctest::Approx(0.0).epsilon(1e-12));

  // Mixing every row with the uniform law: the termwise sum by hand.
  const std::size_t bins = part.sinr_bins();
  SinrProfile mixed(part.cells(), bins);
  double expected = 0.0;
  std::vector<double> w2(part.cells(), 0.0);
  for (std::size_t a = 0; a < part.cells(); ++a) {
    for (std::size_t b = 0; b < part.cells(); ++b) w2[b] += omega.at(a, b);
  }
  for (std::size_t a = 0; a < part.cells(); ++a) {
    std::vector<double> row(bins);
    double h = 0.0;
    for (std::size_t e = 0; e < bins; ++e) {
      row[e] = 0.9 * k.row(a)[e] + 0.1 / static_cast<double>(bins);
      if (k.row(a)[e] == 0.0) {
        h = kInf;
      } else {
        h += row[e] * std::log(row[e] / k.row(a)[e]);
      }
    }
    mixed.set_row(a, row);
    expected += w2[a] * h;
  }
  expected *= 0.5;
  const RateReport jt = ev.J_tilde(mixed, sigma, omega);
  if (std::isinf(expected)) {
    CHECK(jt.infinite);
  } else {
    CHECK(jt.total == doctest::Approx(expected).epsilon(1e-10));
  }

  // A row charging a bin the kernel gives no mass.
  SinrProfile off(part.cells(), bins);
  for (std::size_t a = 0; a < part.cells(); ++a) off.set_row(a, k.row(a));
  bool found = false;
  for (std::size_t a = 0; a < part.cells() && !found; ++a) {
    for (std::size_t e = 0; e < bins; ++e) {
      if (k.row(a)[e] == 0.0) {
        std::vector<double> unit(bins, 0.0);
        unit[e] = 1.0;
        off.set_row(a, unit);
        found = true;
        break;
      }
    }
  }
  if (!found) {
    // Every bin is charged; force an off-support row through an empty row instead.
    off.mark_empty(0);
  }
  const RateReport inf_report = ev.J_tilde(off, sigma, omega);
  CHECK(inf_report.infinite);
  CHECK(inf_report.infinite_component == "sinr");

  // J_star adds the three components.
  std::vector<double> sw(sigma.weights().begin(), sigma.weights().end());
  sw[0] += 0.02;
  sw[1] -= 0.02;
  const BinnedMeasure s2 = cells_measure(sw);
  const RateReport js = ev.J_star(s2, omega.scaled(1.1), mixed);
  if (!js.infinite) {
    CHECK(js.total == doctest::Approx(ev.I1(s2).total + ev.I_sigma(omega.scaled(1.1), s2).total +
                                      ev.J_tilde(mixed, s2, omega.scaled(1.1)).total));
  }
}

TEST_CASE("h_lambda_D against a midpoint oracle") {
  ModelConfig c;
  c.lambda = 100;
  const std::vector<double> x{0.25, 0.5};
  const std::vector<double> y{0.75, 0.5};
  const double lib = h_lambda_D(x, 1.0, y, 1.0, c).value;
  const double oracle = h_riemann(c, 0.25, 0.5, 0.75, 0.5, 2048);
  CHECK(std::abs(lib - oracle) <= 1e-6);
  CHECK(lib == doctest::Approx(0.8403920615).epsilon(1e-8));

  c.recenter_interference = true;
  const double lib_r = h_lambda_D(x, 1.0, y, 1.0, c).value;
  CHECK(std::abs(lib_r - h_riemann(c, 0.25, 0.5, 0.75, 0.5, 2048)) <= 1e-6);
  CHECK(lib_r == doctest::Approx(1.1172076140).epsilon(1e-8));
}

TEST_CASE("h_lambda_D properties") {
  ModelConfig c;
  c.lambda = 100;
  c.path_loss_exponent = 1.5;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> x{u(gen), u(gen)};
    const std::vector<double> y{u(gen), u(gen)};
    const double rx = 0.2 + u(gen), ry = 0.2 + u(gen);
    for (bool rec : {false, true}) {
      c.recenter_interference = rec;
      const double a = h_lambda_D(x, rx, y, ry, c).value;
      const double b = h_lambda_D(y, ry, x, rx, c).value;
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, a));
    }
  }
  c.recenter_interference = false;
  c.tau_base = 0.0;
  CHECK(h_lambda_D(std::vector<double>{0.2, 0.2}, 1.0, std::vector<double>{0.4, 0.4}, 1.0, c)
            .value == 0.0);
  c.tau_base = 1.0;
  CHECK_THROWS(h_lambda_D(std::vector<double>{0.2, 0.2}, 1.0, std::vector<double>{0.2, 0.2}, 1.0, c));

  numerics::AdaptiveOptions loose;
  loose.rel_tol = 1e-6;
  numerics::AdaptiveOptions tight = loose;
  tight.rel_tol = 5e-7;
  const std::vector<double> x{0.1, 0.9};
  const std::vector<double> y{0.6, 0.3};
  const double hl = h_lambda_D(x, 1.0, y, 2.0, c, loose).value;
  const double ht = h_lambda_D(x, 1.0, y, 2.0, c, tight).value;
  CHECK(std::abs(hl - ht) <= 2e-6 * hl);
}

TEST_CASE("h* diagnostic") {
  ModelConfig c;
  c.tau_base = 0.0;
  const std::vector<double> x{0.3, 0.5};
  const std::vector<double> y{0.7, 0.5};
  const std::vector<double> grid{10, 100, 1000};
  for (const auto& r : h_star_diagnostic(x, 1.0, y, 1.0, c, grid)) {
    CHECK(r.p == 1.0);
    CHECK(r.value == doctest::Approx(r.lambda));
  }
  c.tau_base = 0.01;
  const auto rows = h_star_diagnostic(x, 1.0, y, 1.0, c, grid);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].p < rows[i - 1].p);
}

TEST_CASE("radial box integral closed form") {
  const Box box{{0.0, 0.0}, {1.0, 1.0}};
  const double pts[][2] = {{0.3, 0.6}, {0.0, 0.0}, {1.0, 0.25}, {1.7, -0.4}, {0.5, 0.5}};
  for (const auto& p : pts) {
    const std::vector<double> x{p[0], p[1]};
    CHECK(radial_box_integral(box, x, 1.0) ==
          doctest::Approx(radial_closed_form(box, p[0], p[1])).epsilon(1e-10));
  }
  const Box thin{{0.2, 0.1}, {1.4, 0.35}};
  const std::vector<double> x{0.5, 0.9};
  CHECK(radial_box_integral(thin, x, 1.0) ==
        doctest::Approx(radial_closed_form(thin, 0.5, 0.9)).epsilon(1e-10));
  CHECK_THROWS_AS(radial_box_integral(box, x, 2.0), ConfigError);
}

TEST_CASE("typical SINR law against a midpoint oracle") {
  ModelConfig c = limit_config(100, 2.0);
  c.noise = 0.1;
  c.tau_base = 0.5;
  c.gamma_base = 0.7;
  const PartitionSpec part = make_partition(c, {2, 2});
  const SinrProfile prof = typical_sinr_measure(c, part);
  const std::size_t bins = part.sinr_bins();
  const double cr = c.power_rate;

  for (std::size_t cell : {std::size_t{0}, std::size_t{3 * part.power_bins() + 3}}) {
    const std::vector<double> x = part.spatial_box(part.cell_spatial(cell)).center();
    const double rho = representative_power(c, part, part.cell_power(cell));
    const double k = c.noise + c.gamma(rho) * radial_closed_form(c.window, x[0], x[1]) / cr;
    const int ny = 1024;
    auto survival = [&](double a) {
      double sum = 0.0;
      for (int i = 0; i < ny; ++i) {
        const double y0 = (i + 0.5) / ny;
        for (int j = 0; j < ny; ++j) {
          const double y1 = (j + 0.5) / ny;
          sum += std::exp(-cr * a * k * std::hypot(y0 - x[0], y1 - x[1]));
        }
      }
      return sum * 2.0 / (static_cast<double>(ny) * ny);
    };
    std::vector<double> s;
    for (double e : part.sinr_edges) s.push_back(survival(e));
    const double total = survival(0.0);
    std::vector<double> oracle(bins);
    oracle[0] = total - s[0];
    for (std::size_t e = 1; e < s.size(); ++e) oracle[e] = s[e - 1] - s[e];
    oracle[bins - 1] = s.back();
    for (std::size_t e = 0; e < bins; ++e) {
      const double o = oracle[e] / total;
      const double v = prof.row(cell)[e];
      if (o > 1e-3) {
        INFO("cell " << cell << " bin " << e << " oracle " << o << " lib " << v);
        CHECK(std::abs(v - o) <= 1e-4 * o);
      } else {
        CHECK(std::abs(v - o) <= 1e-7);
      }
    }
    CHECK(typical_sinr_survival(c, x, rho, 0.0) == doctest::Approx(1.0));
    CHECK(typical_sinr_survival(c, x, rho, part.sinr_edges[2]) ==
          doctest::Approx(s[2] / total).epsilon(1e-4));
  }
  CHECK_THROWS_AS(typical_sinr_measure(ModelConfig{}, part), ConfigError);
}

TEST_CASE("kernel rows are probability vectors") {
  ModelConfig c = limit_config(100, 1.0);
  c.noise = 0.05;
  c.tau_base = 0.3;
  const PartitionSpec part = make_partition(c, {3, 3}, std::vector<double>{0.5, 1.5});
  const PhiGeometry geo(c, part);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> sw(part.cells());
    for (double& v : sw) v = u(gen);
    const BinnedMeasure sigma = cells_measure(sw);
    std::vector<double> ow(part.cells() * part.cells());
    for (double& v : ow) v = u(gen) < 0.3 ? u(gen) : 0.0;
    const BinnedMeasure omega =
        BinnedMeasure::from_weights(BinnedMeasure::Support::cell_pairs, part.cells(), ow);
    const PhiWeights phi(geo, sigma);
    for (std::size_t a = 0; a < part.spatial_cells(); ++a) {
      for (std::size_t b = 0; b < part.cells(); ++b) {
        double s = 0.0;
        for (double w : phi.weights(a, b)) {
          CHECK(w >= 0.0);
          s += w;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
      }
    }
    const SinrProfile prof = kernel_profile(phi, omega, part);
    for (std::size_t a = 0; a < part.cells(); ++a) {
      double col = 0.0;
      for (std::size_t b = 0; b < part.cells(); ++b) col += omega.at(b, a);
      CHECK(prof.empty(a) == (col == 0.0));
      if (prof.empty(a)) continue;
      double s = 0.0;
      for (double w : prof.row(a)) s += w;
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("cell-center kernel by enumeration") {
  ModelConfig c = limit_config(100, 1.0);
  c.window = Box{{0.0, 0.0}, {2.0, 1.0}};
  c.noise = 0.2;
  c.gamma_base = 1.5;
  c.tau_base = 0.3;
  c.power_rate = 1.3;
  const PartitionSpec part = make_partition(c, {2, 1}, std::vector<double>{0.8});
  const PhiOptions opts{PhiRule::cell_center, 1};
  const PhiGeometry geo(c, part, opts);
  const std::size_t np = part.power_bins();
  const std::size_t cells = part.cells();
  const std::size_t bins = part.sinr_bins();
  const double cr = c.power_rate;

  // Representative powers by integration by parts.
  auto rep = [&](double lo, double hi) {
    const double z = std::exp(-cr * lo) - (std::isinf(hi) ? 0.0 : std::exp(-cr * hi));
    const double tl = (lo + 1.0 / cr) * std::exp(-cr * lo);
    const double th = std::isinf(hi) ? 0.0 : (hi + 1.0 / cr) * std::exp(-cr * hi);
    return (tl - th) / z;
  };
  const double lo[2] = {0.0, 0.8};
  const double hi[2] = {0.8, kInf};
  const double rbar[2] = {rep(lo[0], hi[0]), rep(lo[1], hi[1])};
  CHECK(geo.representative_powers()[0] == doctest::Approx(rbar[0]));
  CHECK(geo.representative_powers()[1] == doctest::Approx(rbar[1]));

  const double centers[2][2] = {{0.5, 0.5}, {1.5, 0.5}};
  const Box boxes[2] = {Box{{0.0, 0.0}, {1.0, 1.0}}, Box{{1.0, 0.0}, {2.0, 1.0}}};
  const BinnedMeasure sigma = cells_measure({0.15, 0.35, 0.3, 0.2});
  std::vector<double> ow(cells * cells);
  const double sym[4][4] = {{0.2, 0.1, 0.4, 0.05}, {0.1, 0.0, 0.3, 0.2},
                            {0.4, 0.3, 0.1, 0.25}, {0.05, 0.2, 0.25, 0.6}};
  for (std::size_t a = 0; a < cells; ++a)
    for (std::size_t b = 0; b < cells; ++b) ow[a * cells + b] = sym[a][b];
  const BinnedMeasure omega =
      BinnedMeasure::from_weights(BinnedMeasure::Support::cell_pairs, cells, ow);
  const SinrProfile lib = kernel_profile(PhiWeights(geo, sigma), omega, part);

  for (std::size_t a = 0; a < cells; ++a) {
    const std::size_t sa = a / np;
    double interference = 0.0;
    for (std::size_t s = 0; s < 2; ++s) {
      double power = 0.0;
      for (std::size_t p = 0; p < np; ++p) power += sigma[s * np + p] * rbar[p];
      // eta(s) = 1/2 and the density is 1/2: the cell average is the plain radial integral.
      interference += power * radial_closed_form(boxes[s], centers[sa][0], centers[sa][1]);
    }
    const double k = c.noise + c.gamma_base * interference;
    std::vector<double> row(bins, 0.0);
    double marginal = 0.0;
    for (std::size_t b = 0; b < cells; ++b) {
      const double w = omega.at(b, a);
      if (w == 0.0) continue;
      marginal += w;
      const std::size_t sb = b / np;
      const std::size_t pb = b % np;
      const double d = std::hypot(centers[sa][0] - centers[sb][0], centers[sa][1] - centers[sb][1]);
      std::vector<double> tail;
      for (double e : part.sinr_edges) tail.push_back(bin_tail(e * k * d, lo[pb], hi[pb], cr));
      row[0] += w * (1.0 - tail[0]);
      for (std::size_t e = 1; e < tail.size(); ++e) row[e] += w * (tail[e - 1] - tail[e]);
      row[bins - 1] += w * tail.back();
    }
    for (std::size_t e = 0; e < bins; ++e) {
      CHECK(std::abs(lib.row(a)[e] - row[e] / marginal) <= 1e-9);
    }
  }
}

TEST_CASE("kernel concentrates in the floor bin under overwhelming noise") {
  ModelConfig c = limit_config(100, 1.0);
  c.noise = 1e12;
  c.tau_base = 0.5;
  const PartitionSpec part = make_partition(c, {2, 2});
  const RateEvaluator ev(c, part);
  const SinrProfile k = ev.kernel(ev.reference(), ev.link_reference(ev.reference()));
  for (std::size_t a = 0; a < part.cells(); ++a) {
    CHECK(k.row(a)[0] == doctest::Approx(1.0).epsilon(1e-6));
  }
}
