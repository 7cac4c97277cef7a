#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sinrldp/analytics.hpp"
#include "sinrldp/config.hpp"
#include "sinrldp/model.hpp"
#include "sinrldp/partition.hpp"

namespace sinrldp {

/// Runs fn(0), ..., fn(n - 1) on up to `threads` workers. Each index must write only
/// its own output slot; the first exception is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of a flat experiment table. NaN marks a column that does not apply.
struct ReportRow {
  std::string experiment;
  std::string group;
  double lambda = kNaN;
  std::uint64_t trials = 0;
  std::string statistic;
  double estimate = kNaN;
  double std_error = kNaN;
  double oracle = kNaN;
  double z_score = kNaN;
  double gap = kNaN;
};

struct Check {
  std::string name;
  double observed = kNaN;
  double bound = kNaN;
  bool pass = false;
};

struct ExperimentReport {
  std::string experiment;
  ModelConfig config;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::vector<ReportRow> rows;
  std::vector<Check> checks;
  bool pass = false;
  std::string note;
};

// ---------------------------------------------------------------------------
// Link probability of a planted pair

struct PlantedPair {
  PoweredPoint first;
  PoweredPoint second;
  /// Draw both planted powers from Exponential(c) in every trial instead of using the
  /// fixed marks.
  bool redraw_powers = false;
};

struct Prop1Estimate {
  double lambda = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t linked = 0;
  double p_hat = 0.0;
  double std_error = 0.0;
  double oracle = 0.0;
  double h = 0.0;
  double h_error = 0.0;
  double z_score = 0.0;
  double gap = 0.0;
};

/// Monte-Carlo frequency of the two-sided link between the planted pair, with the
/// PPP of `config` as interferers, against exp(-lambda h_lambda_D). Trial t draws
/// its PPP from streams (seed, stream_offset + t).
Prop1Estimate estimate_prop1(const ModelConfig& config, const PlantedPair& pair,
                             std::uint64_t trials, std::uint64_t seed, unsigned threads = 1,
                             std::uint64_t stream_offset = 0);

/// tau_base for which the oracle link probability at config.lambda equals `target`.
double tune_tau_base(const ModelConfig& config, const PlantedPair& pair, double target);

/// Primary check |z| <= 3 at config.lambda. When it fails, the fallback check is that
/// the gap at `fallback_lambda` (same thresholds) is strictly smaller.
ExperimentReport verify_prop1(const ModelConfig& config, const PlantedPair& pair,
                              std::uint64_t trials, std::uint64_t seed, unsigned threads = 1,
                              double fallback_lambda = 0.0);

// ---------------------------------------------------------------------------
// Law of large numbers and the conditional SINR law

/// Mean TV errors of M1, M2 and the pooled SINR histogram against the zero-cost
/// triplet along a lambda grid.
ExperimentReport verify_lln(const ModelConfig& config, const PartitionRequest& part,
                            std::span<const double> lambda_grid, std::uint64_t reps,
                            std::uint64_t seed, unsigned threads = 1, PhiOptions opts = {});

struct KernelComparison {
  double mean_tv = 0.0;
  std::size_t nonempty_cells = 0;
  std::size_t empty_cells = 0;
  std::vector<double> cell_tv;  // NaN for empty cells
};

/// Per-cell histograms of neighbor SINR accumulated over trials, against kernel rows
/// recomputed in each trial with sigma = M1 and omega = M2.
KernelComparison compare_sinr_kernel(const ModelConfig& config, const PartitionSpec& part,
                                     std::uint64_t trials, std::uint64_t seed,
                                     unsigned threads = 1, PhiOptions opts = {});

ExperimentReport verify_sinr_kernel(const ModelConfig& config, const PartitionSpec& part,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads = 1, double tolerance = 0.1,
                                    PhiOptions opts = {});

// ---------------------------------------------------------------------------
// Exactly solvable two-cell surrogate

/// Two spatial cells [0,1] x [0,1] and [1,2] x [0,1] carrying eta mass mass/2 each, a
/// single power bin, constant h*, critical scaling a_lambda = 1/lambda.
struct TwoCellSurrogate {
  double h_star = 2.0;
  double mass = 1.0;

  double typical_edge_mass() const { return h_star * mass * mass; }
  ModelConfig model(double lambda) const;
  PartitionSpec partition(const ModelConfig& config) const;
};

/// log P(N ~ Binomial(trials, p) >= k).
double log_binomial_tail(std::uint64_t trials, double p, std::uint64_t k);

/// Exact log P(2|E|/lambda >= threshold): Poisson point counts mixed over binomial
/// edge counts. Poisson terms are dropped once they fall below e^-60 of the running
/// maximum, so the truncation is relative to the event probability itself.
double two_cell_exact_log_prob(const TwoCellSurrogate& s, double lambda, double threshold);
double two_cell_exact_prob(const TwoCellSurrogate& s, double lambda, double threshold);

/// H(sigma | eta (x) q) + 1/2 H(omega || h* sigma (x) sigma) on the surrogate, with
/// sigma split evenly over the two cells and omega proportional to h* sigma (x) sigma.
double surrogate_rate(const TwoCellSurrogate& s, double point_mass, double edge_mass);

struct SurrogateInfimum {
  double value = 0.0;
  double point_mass = 0.0;
  double edge_mass = 0.0;
  bool degenerate = false;
};

/// inf of surrogate_rate over {edge_mass >= threshold}: a 400 x 400 grid followed by
/// nested golden-section refinement around the grid argmin.
SurrogateInfimum surrogate_rate_infimum(const TwoCellSurrogate& s, double threshold);

ExperimentReport verify_ldp_surrogate(const TwoCellSurrogate& s,
                                      std::span<const double> lambda_grid, double threshold,
                                      unsigned threads = 1);

}  // namespace sinrldp
