#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sinrldp/analytics.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/model.hpp"

using namespace sinrldp;

namespace {

PoweredPoint pt(double x, double y, double rho) { return {{x, y}, rho}; }

SinrNetwork manual(std::vector<PoweredPoint> points, std::vector<Edge> edges, ModelConfig c) {
  SinrNetwork n;
  n.points = std::move(points);
  n.edges = std::move(edges);
  n.config = std::move(c);
  return n;
}

ModelConfig limit_config(double lambda, double h) {
  ModelConfig c;
  c.lambda = lambda;
  c.edge_mode = EdgeMode::limit;
  HStar hs;
  hs.value = h;
  c.h_star = hs;
  return c;
}

}  // namespace

TEST_CASE("power measure by definition") {
  ModelConfig c;
  c.lambda = 10;
  const PartitionSpec part = make_partition(c, {2, 2});
  const auto net = manual({pt(0.1, 0.1, 0.1), pt(0.2, 0.1, 0.1), pt(0.1, 0.3, 0.2)}, {}, c);
  const BinnedMeasure m = empirical_power_measure(net, part);
  CHECK(m[part.cell_index(std::vector<double>{0.1, 0.1}, 0.1)] == doctest::Approx(0.3));
  CHECK(m.mass() == doctest::Approx(0.3));
  CHECK(m.counted());
  CHECK(empirical_power_measure(manual({}, {}, c), part).mass() == 0.0);
}

TEST_CASE("link measure by definition") {
  ModelConfig c;
  c.lambda = 10;
  const PartitionSpec part = make_partition(c, {2, 1}, std::vector<double>{});
  const auto across = manual({pt(0.1, 0.5, 1.0), pt(0.9, 0.5, 1.0)}, {{0, 1}}, c);
  const BinnedMeasure w = empirical_link_measure(across, part);
  CHECK(w.at(0, 1) == doctest::Approx(0.1));
  CHECK(w.at(1, 0) == doctest::Approx(0.1));
  CHECK(w.mass() == doctest::Approx(0.2));
  CHECK(w.symmetric());

  const auto inside = manual({pt(0.1, 0.5, 1.0), pt(0.2, 0.5, 1.0)}, {{0, 1}}, c);
  const BinnedMeasure v = empirical_link_measure(inside, part);
  CHECK(v.at(0, 0) == doctest::Approx(0.2));
  CHECK(v.mass() == doctest::Approx(0.2));

  const BinnedMeasure m2 = second_marginal(w);
  CHECK(m2[0] == doctest::Approx(0.1));
  CHECK(m2[1] == doctest::Approx(0.1));
  CHECK(m2.mass() == doctest::Approx(0.2));
}

TEST_CASE("sinr measure histogram of a hand-built neighborhood") {
  // lambda is huge so the normalized interference is negligible and SINR = rho d^-1 / N0.
  ModelConfig c;
  c.lambda = 1e12;
  c.noise = 1.0;
  const PartitionSpec part = make_partition(c, {2, 2}, std::vector<double>{}, std::vector<double>{2, 4});
  const auto net = manual({pt(0.6, 0.6, 1.0), pt(0.1, 0.6, 0.6), pt(0.6, 0.35, 0.85)},
                          {{0, 1}, {0, 2}}, c);
  const SinrProfile p = empirical_sinr_measure(net, part);
  const std::size_t rx = part.cell_index(net.points[0].location, 1.0);
  REQUIRE(!p.empty(rx));
  const auto row = p.row(rx);
  CHECK(row[0] == 0.0);
  CHECK(row[1] == doctest::Approx(0.5));  // 1.2 in [1, 2)
  CHECK(row[2] == doctest::Approx(0.5));  // 3.4 in [2, 4)
  CHECK(row[3] == 0.0);
  CHECK(p.row_count(rx) == 2);

  const SinrProfile none = empirical_sinr_measure(manual(net.points, {}, c), part);
  for (std::size_t a = 0; a < part.cells(); ++a) CHECK(none.empty(a));
}

TEST_CASE("empirical measure invariants on random networks") {
  const ModelConfig c = limit_config(150, 3.0);
  const PartitionSpec part = make_partition(c, {3, 2});
  for (std::uint64_t t = 0; t < 20; ++t) {
    const SinrNetwork net = generate_network(c, 5, t);
    const BinnedMeasure m1 = empirical_power_measure(net, part);
    CHECK(m1.mass() == doctest::Approx(net.points.size() / c.lambda).epsilon(1e-14));
    const BinnedMeasure m2 = empirical_link_measure(net, part);
    CHECK(m2.symmetric());
    CHECK(second_marginal(m2).mass() == doctest::Approx(m2.mass()).epsilon(1e-12));
    const SinrProfile nu = empirical_sinr_measure(net, part);
    for (std::size_t a = 0; a < part.cells(); ++a) {
      if (nu.empty(a)) continue;
      double s = 0.0;
      for (double v : nu.row(a)) s += v;
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("M1 error at lambda = 1000 matches the folded-normal prediction") {
  // TV = (sum |d_A| + |sum d_A|) / 2 with independent Poisson cell counts; under the
  // normal approximation E|d_A| = sqrt(2 mu_A / (pi lambda)).
  ModelConfig c;
  c.lambda = 1000;
  const PartitionSpec part = make_partition(c, {4, 4});
  const BinnedMeasure ref = reference_power_measure(c, part);
  double predicted = std::sqrt(2.0 / (std::numbers::pi * c.lambda));
  for (std::size_t a = 0; a < part.cells(); ++a) {
    predicted += std::sqrt(2.0 * ref[a] / (std::numbers::pi * c.lambda));
  }
  predicted *= 0.5;
  double mean = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    mean += tv_distance(empirical_power_measure(generate_network(c, 21, t), part), ref);
  }
  mean /= 100.0;
  CHECK(mean == doctest::Approx(predicted).epsilon(0.1));
}

TEST_CASE("limit-mode link mass concentrates at the h* integral") {
  const ModelConfig c = limit_config(200, 2.0);
  const PartitionSpec part = make_partition(c, {2, 2});
  std::vector<double> mass;
  for (std::uint64_t t = 0; t < 200; ++t) {
    mass.push_back(empirical_link_measure(generate_network(c, 13, t), part).mass());
  }
  double m = 0.0;
  for (double v : mass) m += v;
  m /= mass.size();
  double ss = 0.0;
  for (double v : mass) ss += (v - m) * (v - m);
  CHECK(std::abs(m - 2.0) < 3.0 * std::sqrt(ss / (mass.size() - 1) / mass.size()));
}

TEST_CASE("tv distance") {
  const std::vector<double> a{0.5, 0.5};
  const std::vector<double> b{0.25, 0.75};
  CHECK(tv_distance(a, b) == doctest::Approx(0.25));
  CHECK(tv_distance(a, a) == 0.0);
  const std::vector<double> c{0.5, 0.0};
  CHECK(tv_distance(a, c) == doctest::Approx(0.5));
}

TEST_CASE("coarsening the measures equals measuring on the coarse partition") {
  ModelConfig c = limit_config(300, 2.5);
  c.noise = 0.3;
  const PartitionSpec fine = make_partition(c, {4, 4});
  const double tau = c.sinr_floor();
  const PartitionSpec coarse = make_partition(c, {2, 1}, std::vector<double>{fine.power_edges[1]},
                                              std::vector<double>{4 * tau, 16 * tau});
  REQUIRE(is_coarsening(fine, coarse));
  CHECK(!is_coarsening(coarse, fine));
  for (std::uint64_t t = 0; t < 5; ++t) {
    const SinrNetwork net = generate_network(c, 31, t);
    CHECK(coarsen(empirical_power_measure(net, fine), fine, coarse) ==
          empirical_power_measure(net, coarse));
    CHECK(coarsen(empirical_link_measure(net, fine), fine, coarse) ==
          empirical_link_measure(net, coarse));
    CHECK(coarsen(empirical_sinr_measure(net, fine), fine, coarse) ==
          empirical_sinr_measure(net, coarse));
  }
}

TEST_CASE("partition defaults and edge lists") {
  ModelConfig c;
  c.tau_base = 0.5;
  const PartitionSpec p = make_partition(c, {4, 4});
  CHECK(p.power_bins() == 4);
  CHECK(p.power_edges[1] == doctest::Approx(std::log(2.0)));
  CHECK(p.sinr_edges == std::vector<double>{0.5, 1.0, 2.0, 4.0, 8.0});
  CHECK(make_partition(c, {4, 4}, std::vector<double>{}).power_bins() == 1);
  CHECK(make_partition(c, {1, 1}, std::nullopt, std::vector<double>{}).sinr_bins() == 2);
  CHECK_THROWS_AS(make_partition(c, {4, 4}, std::nullopt, std::vector<double>{0.4}), ConfigError);
  c.tau_base = 0.0;
  CHECK(make_partition(c, {1, 1}).sinr_edges == std::vector<double>{0, 1, 2, 4, 8});
}
