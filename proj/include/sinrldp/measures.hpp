#pragma once

#include <vector>

#include "sinrldp/model.hpp"
#include "sinrldp/partition.hpp"

namespace sinrldp {

/// M1: (points in cell) / lambda.
BinnedMeasure empirical_power_measure(const SinrNetwork& net, const PartitionSpec& part);

/// M2: each edge adds 1/lambda at (A, B) and at (B, A).
BinnedMeasure empirical_link_measure(const SinrNetwork& net, const PartitionSpec& part);

/// Neighbor-SINR histograms per cell. For every edge {i, j} the value SINR(i -> j),
/// computed against the M1-normalized interference (1/lambda) sum_{k != i, j}, is
/// binned in the row of j's cell, and symmetrically.
SinrProfile empirical_sinr_measure(const SinrNetwork& net, const PartitionSpec& part);

/// omega_2(B) = sum_A omega(A, B).
BinnedMeasure second_marginal(const BinnedMeasure& pair_measure);

/// Total variation sup_A |mu(A) - nu(A)|; equals half the L1 distance for equal masses.
double tv_distance(std::span<const double> a, std::span<const double> b);
double tv_distance(const BinnedMeasure& a, const BinnedMeasure& b);

/// Pools the rows of a profile with weights `row_weights` (e.g. omega_2) into one
/// probability vector. A counted profile pools its raw counts instead.
std::vector<double> aggregate_profile(const SinrProfile& profile,
                                      std::span<const double> row_weights);

/// True when `coarse` is obtained from `fine` by merging whole cells and bins.
bool is_coarsening(const PartitionSpec& fine, const PartitionSpec& coarse);

/// Re-bins onto a coarser partition. Counted inputs are re-binned by their counts.
BinnedMeasure coarsen(const BinnedMeasure& m, const PartitionSpec& fine,
                      const PartitionSpec& coarse);
SinrProfile coarsen(const SinrProfile& p, const PartitionSpec& fine, const PartitionSpec& coarse);

}  // namespace sinrldp
