#include <cmath>
#include <limits>
#include <stdexcept>

#include "sinrldp/analytics.hpp"
#include "sinrldp/measures.hpp"

namespace sinrldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// m * phi(s / m) with phi(r) = r log r - r + 1 >= 0, accurate near r = 1.
double divergence_term(double s, double m) {
  if (s == 0.0) return m;
  const double r = s / m;
  const double v = m * (r * std::log1p(r - 1.0) - (r - 1.0));
  return v > 0.0 ? v : 0.0;
}

void check_same(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative entropy: partition mismatch");
}

void check_same(const BinnedMeasure& a, const BinnedMeasure& b) {
  if (a.support() != b.support() || a.cells() != b.cells()) {
    throw std::invalid_argument("relative entropy: partition mismatch");
  }
}

RateReport finish(RateReport r) {
  const double terms[3] = {r.power_term, r.link_term, r.sinr_term};
  const char* names[3] = {"power", "link", "sinr"};
  r.total = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (std::isinf(terms[i])) {
      if (!r.infinite) r.infinite_component = names[i];
      r.infinite = true;
    } else {
      r.total += terms[i];
    }
  }
  if (r.infinite) r.total = kInf;
  return r;
}

}  // namespace

double rel_entropy(std::span<const double> sigma, std::span<const double> mu) {
  check_same(sigma, mu);
  double sum = 0.0;
  double ms = 0.0;
  double mm = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    ms += sigma[i];
    mm += mu[i];
    if (sigma[i] == 0.0) {
      sum += mu[i];
      continue;
    }
    if (mu[i] == 0.0) return kInf;
    sum += divergence_term(sigma[i], mu[i]);
  }
  // sum_A sigma log(sigma/mu) = sum_A m phi(sigma/m) + |sigma| - |mu|.
  const double v = sum + (ms - mm);
  return (v < 0.0 && std::abs(ms - mm) <= 1e-12 * std::max(1.0, mm)) ? 0.0 : v;
}

double rel_entropy(const BinnedMeasure& sigma, const BinnedMeasure& mu) {
  check_same(sigma, mu);
  return rel_entropy(sigma.weights(), mu.weights());
}

double rel_entropy_unnorm(std::span<const double> omega, std::span<const double> m) {
  check_same(omega, m);
  double mass = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    mass += omega[i];
    if (omega[i] > 0.0 && m[i] == 0.0) return kInf;
    sum += divergence_term(omega[i], m[i]);
  }
  if (!(mass > 0.0)) return kInf;
  return sum;
}

double rel_entropy_unnorm(const BinnedMeasure& omega, const BinnedMeasure& m) {
  check_same(omega, m);
  return rel_entropy_unnorm(omega.weights(), m.weights());
}

RateEvaluator::RateEvaluator(const ModelConfig& config, const PartitionSpec& part,
                             PhiOptions opts)
    : config_(config),
      part_(part),
      opts_(opts),
      reference_(reference_power_measure(config, part)),
      hstar_(hstar_cell_matrix(config, part)) {}

const PhiGeometry& RateEvaluator::geometry() const {
  if (!geometry_) geometry_.emplace(config_, part_, opts_);
  return *geometry_;
}

BinnedMeasure RateEvaluator::link_reference(const BinnedMeasure& sigma) const {
  const std::size_t k = part_.cells();
  if (sigma.support() != BinnedMeasure::Support::cells || sigma.cells() != k) {
    throw std::invalid_argument("link_reference: partition mismatch");
  }
  std::vector<double> w(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) w[a * k + b] = hstar_[a * k + b] * sigma[a] * sigma[b];
  }
  return BinnedMeasure::from_weights(BinnedMeasure::Support::cell_pairs, k, std::move(w));
}

SinrProfile RateEvaluator::kernel(const BinnedMeasure& sigma, const BinnedMeasure& omega) const {
  return kernel_profile(PhiWeights(geometry(), sigma), omega, part_);
}

RateReport RateEvaluator::I1(const BinnedMeasure& sigma) const {
  RateReport r;
  r.power_term = std::abs(sigma.mass() - 1.0) > 1e-9 ? kInf : rel_entropy(sigma, reference_);
  return finish(r);
}

RateReport RateEvaluator::I_sigma(const BinnedMeasure& omega, const BinnedMeasure& sigma) const {
  RateReport r;
  r.link_term = 0.5 * rel_entropy_unnorm(omega, link_reference(sigma));
  return finish(r);
}

RateReport RateEvaluator::I(const BinnedMeasure& sigma, const BinnedMeasure& omega) const {
  RateReport r;
  r.power_term = I1(sigma).power_term;
  r.link_term = I_sigma(omega, sigma).link_term;
  return finish(r);
}

RateReport RateEvaluator::J_tilde(const SinrProfile& nu, const BinnedMeasure& sigma,
                                  const BinnedMeasure& omega) const {
  if (nu.cells() != part_.cells() || nu.bins() != part_.sinr_bins()) {
    throw std::invalid_argument("J_tilde: partition mismatch");
  }
  const SinrProfile k = kernel(sigma, omega);
  const BinnedMeasure w2 = second_marginal(omega);
  RateReport r;
  double sum = 0.0;
  for (std::size_t a = 0; a < part_.cells(); ++a) {
    if (!(w2[a] > 0.0)) continue;
    if (nu.empty(a)) {
      sum = kInf;
      break;
    }
    const double h = rel_entropy(nu.row(a), k.row(a));
    if (std::isinf(h)) {
      sum = kInf;
      break;
    }
    sum += w2[a] * h;
  }
  r.sinr_term = 0.5 * sum;
  return finish(r);
}

RateReport RateEvaluator::J_star(const BinnedMeasure& sigma, const BinnedMeasure& omega,
                                 const SinrProfile& nu) const {
  RateReport r;
  r.power_term = I1(sigma).power_term;
  r.link_term = I_sigma(omega, sigma).link_term;
  r.sinr_term = J_tilde(nu, sigma, omega).sinr_term;
  return finish(r);
}

RateReport rate_I1(const BinnedMeasure& sigma, const ModelConfig& config,
                   const PartitionSpec& part) {
  // I1 needs no h*; build the reference directly.
  RateReport r;
  r.power_term = std::abs(sigma.mass() - 1.0) > 1e-9
                     ? kInf
                     : rel_entropy(sigma, reference_power_measure(config, part));
  return finish(r);
}

RateReport rate_I_sigma(const BinnedMeasure& omega, const BinnedMeasure& sigma,
                        const ModelConfig& config, const PartitionSpec& part) {
  return RateEvaluator(config, part).I_sigma(omega, sigma);
}

RateReport rate_I(const BinnedMeasure& sigma, const BinnedMeasure& omega,
                  const ModelConfig& config, const PartitionSpec& part) {
  return RateEvaluator(config, part).I(sigma, omega);
}

RateReport rate_J_tilde(const SinrProfile& nu, const BinnedMeasure& sigma,
                        const BinnedMeasure& omega, const ModelConfig& config,
                        const PartitionSpec& part) {
  return RateEvaluator(config, part).J_tilde(nu, sigma, omega);
}

RateReport rate_J_star(const BinnedMeasure& sigma, const BinnedMeasure& omega,
                       const SinrProfile& nu, const ModelConfig& config,
                       const PartitionSpec& part) {
  return RateEvaluator(config, part).J_star(sigma, omega, nu);
}

}  // namespace sinrldp
