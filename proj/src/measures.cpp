#include "sinrldp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sinrldp {

namespace {

using Support = BinnedMeasure::Support;

bool edges_subset(const std::vector<double>& fine, const std::vector<double>& coarse) {
  return std::all_of(coarse.begin(), coarse.end(), [&](double e) {
    return std::binary_search(fine.begin(), fine.end(), e);
  });
}

std::vector<std::size_t> cell_map(const PartitionSpec& fine, const PartitionSpec& coarse) {
  if (!is_coarsening(fine, coarse)) {
    throw std::invalid_argument("coarsen: target partition is not a coarsening of the source");
  }
  std::vector<std::size_t> out(fine.cells());
  for (std::size_t s = 0; s < fine.spatial_cells(); ++s) {
    std::size_t rest = s;
    std::size_t cs = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < fine.spatial_bins.size(); ++a) {
      const std::size_t k = rest % fine.spatial_bins[a];
      rest /= fine.spatial_bins[a];
      cs += stride * (k * coarse.spatial_bins[a] / fine.spatial_bins[a]);
      stride *= coarse.spatial_bins[a];
    }
    for (std::size_t p = 0; p < fine.power_bins(); ++p) {
      out[s * fine.power_bins() + p] =
          cs * coarse.power_bins() + coarse.power_index(fine.power_lo(p));
    }
  }
  return out;
}

std::vector<std::size_t> sinr_bin_map(const PartitionSpec& fine, const PartitionSpec& coarse) {
  std::vector<std::size_t> out(fine.sinr_bins());
  out[0] = 0;
  for (std::size_t k = 1; k < fine.sinr_bins(); ++k) {
    out[k] = coarse.sinr_index(fine.sinr_edges[k - 1]);
  }
  return out;
}

}  // namespace

BinnedMeasure empirical_power_measure(const SinrNetwork& net, const PartitionSpec& part) {
  std::vector<std::uint64_t> counts(part.cells(), 0);
  for (const PoweredPoint& p : net.points) ++counts[part.cell_index(p.location, p.power)];
  return BinnedMeasure::from_counts(Support::cells, part.cells(), std::move(counts),
                                    net.config.lambda);
}

BinnedMeasure empirical_link_measure(const SinrNetwork& net, const PartitionSpec& part) {
  const std::size_t k = part.cells();
  std::vector<std::size_t> cell(net.points.size());
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    cell[i] = part.cell_index(net.points[i].location, net.points[i].power);
  }
  std::vector<std::uint64_t> counts(k * k, 0);
  for (const auto& [i, j] : net.edges) {
    ++counts[cell[i] * k + cell[j]];
    ++counts[cell[j] * k + cell[i]];
  }
  return BinnedMeasure::from_counts(Support::cell_pairs, k, std::move(counts), net.config.lambda);
}

SinrProfile empirical_sinr_measure(const SinrNetwork& net, const PartitionSpec& part) {
  const ModelConfig& cfg = net.config;
  const std::size_t bins = part.sinr_bins();
  std::vector<std::uint64_t> counts(part.cells() * bins, 0);
  if (net.edges.empty()) return SinrProfile::from_counts(part.cells(), bins, std::move(counts));

  const auto& pts = net.points;
  const double ell = cfg.path_loss_exponent;
  const std::vector<double> total = received_totals(pts, ell);
  auto value = [&](std::size_t tx, std::size_t rx, double g) {
    const double signal = pts[tx].power * g;
    const double interference = std::max(0.0, total[rx] - signal) / cfg.lambda;
    const double denom = cfg.noise + cfg.gamma(pts[rx].power) * interference;
    return denom == 0.0 ? std::numeric_limits<double>::infinity() : signal / denom;
  };
  for (const auto& [i, j] : net.edges) {
    const double g = path_gain_from_squared(squared_distance(pts[i].location, pts[j].location), ell);
    const std::size_t ci = part.cell_index(pts[i].location, pts[i].power);
    const std::size_t cj = part.cell_index(pts[j].location, pts[j].power);
    ++counts[cj * bins + part.sinr_index(value(i, j, g))];
    ++counts[ci * bins + part.sinr_index(value(j, i, g))];
  }
  return SinrProfile::from_counts(part.cells(), bins, std::move(counts));
}

BinnedMeasure second_marginal(const BinnedMeasure& pair_measure) {
  if (pair_measure.support() != Support::cell_pairs) {
    throw std::invalid_argument("second_marginal: pair-indexed measure required");
  }
  const std::size_t k = pair_measure.cells();
  if (pair_measure.counted()) {
    std::vector<std::uint64_t> counts(k, 0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) counts[b] += pair_measure.counts()[a * k + b];
    }
    return BinnedMeasure::from_counts(Support::cells, k, std::move(counts),
                                      pair_measure.divisor());
  }
  std::vector<double> w(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) w[b] += pair_measure.at(a, b);
  }
  return BinnedMeasure::from_weights(Support::cells, k, std::move(w));
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("tv_distance: partition mismatch");
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d > 0.0) {
      pos += d;
    } else {
      neg -= d;
    }
  }
  return std::max(pos, neg);
}

double tv_distance(const BinnedMeasure& a, const BinnedMeasure& b) {
  if (a.support() != b.support() || a.cells() != b.cells()) {
    throw std::invalid_argument("tv_distance: partition mismatch");
  }
  return tv_distance(a.weights(), b.weights());
}

std::vector<double> aggregate_profile(const SinrProfile& profile,
                                      std::span<const double> row_weights) {
  const std::size_t bins = profile.bins();
  std::vector<double> out(bins, 0.0);
  double total = 0.0;
  if (profile.counted()) {
    for (std::size_t c = 0; c < profile.cells(); ++c) {
      for (std::size_t k = 0; k < bins; ++k) {
        const double n = static_cast<double>(profile.counts()[c * bins + k]);
        out[k] += n;
        total += n;
      }
    }
  } else {
    if (row_weights.size() != profile.cells()) {
      throw std::invalid_argument("aggregate_profile: one weight per cell required");
    }
    for (std::size_t c = 0; c < profile.cells(); ++c) {
      if (profile.empty(c) || row_weights[c] <= 0.0) continue;
      const auto row = profile.row(c);
      for (std::size_t k = 0; k < bins; ++k) out[k] += row_weights[c] * row[k];
      total += row_weights[c];
    }
  }
  if (total > 0.0) {
    for (double& v : out) v /= total;
  }
  return out;
}

bool is_coarsening(const PartitionSpec& fine, const PartitionSpec& coarse) {
  if (!(fine.window == coarse.window)) return false;
  if (fine.spatial_bins.size() != coarse.spatial_bins.size()) return false;
  for (std::size_t a = 0; a < fine.spatial_bins.size(); ++a) {
    if (fine.spatial_bins[a] % coarse.spatial_bins[a] != 0) return false;
  }
  if (!edges_subset(fine.power_edges, coarse.power_edges)) return false;
  if (coarse.sinr_edges.empty() || fine.sinr_edges.empty() ||
      coarse.sinr_edges.front() != fine.sinr_edges.front()) {
    return false;
  }
  return edges_subset(fine.sinr_edges, coarse.sinr_edges);
}

BinnedMeasure coarsen(const BinnedMeasure& m, const PartitionSpec& fine,
                      const PartitionSpec& coarse) {
  const std::vector<std::size_t> map = cell_map(fine, coarse);
  const std::size_t kf = fine.cells();
  const std::size_t kc = coarse.cells();
  if (m.cells() != kf) throw std::invalid_argument("coarsen: partition mismatch");
  const bool pairs = m.support() == Support::cell_pairs;
  auto target = [&](std::size_t i) {
    return pairs ? map[i / kf] * kc + map[i % kf] : map[i];
  };
  const std::size_t out_size = pairs ? kc * kc : kc;
  if (m.counted()) {
    std::vector<std::uint64_t> counts(out_size, 0);
    for (std::size_t i = 0; i < m.size(); ++i) counts[target(i)] += m.counts()[i];
    return BinnedMeasure::from_counts(m.support(), kc, std::move(counts), m.divisor());
  }
  std::vector<double> w(out_size, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) w[target(i)] += m[i];
  return BinnedMeasure::from_weights(m.support(), kc, std::move(w));
}

SinrProfile coarsen(const SinrProfile& p, const PartitionSpec& fine, const PartitionSpec& coarse) {
  if (!p.counted()) {
    throw std::invalid_argument("coarsen: only counted SINR profiles can be re-binned exactly");
  }
  const std::vector<std::size_t> map = cell_map(fine, coarse);
  const std::vector<std::size_t> bmap = sinr_bin_map(fine, coarse);
  const std::size_t bf = fine.sinr_bins();
  const std::size_t bc = coarse.sinr_bins();
  std::vector<std::uint64_t> counts(coarse.cells() * bc, 0);
  for (std::size_t c = 0; c < fine.cells(); ++c) {
    for (std::size_t k = 0; k < bf; ++k) {
      counts[map[c] * bc + bmap[k]] += p.counts()[c * bf + k];
    }
  }
  return SinrProfile::from_counts(coarse.cells(), bc, std::move(counts));
}

}  // namespace sinrldp
