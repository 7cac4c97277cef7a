#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sinrldp {

/// Purpose tags mixed into every derived stream. The numeric values are part of the
/// reproducibility contract: changing one changes every artifact sampled with it.
enum class StreamPurpose : std::uint32_t {
  ppp = 1,        // point count and locations
  powers = 2,     // transmit powers
  edges = 3,      // limit-mode Bernoulli links
  surrogate = 4,  // two-cell surrogate simulation
  generic = 5,
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter counter, Key key);
};

/// 64-bit finalizer of SplitMix64; used to derive stream keys.
std::uint64_t mix64(std::uint64_t x);

/// A reproducible random stream identified by (seed, trial, purpose).
///
/// The Philox key is mix64(seed ^ mix64(purpose)); the 128-bit counter holds the
/// block index in words 0-1 and the trial index in words 2-3. Streams with any
/// differing coordinate are independent and can be generated in any order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double rate);
  bool bernoulli(double p) { return uniform() < p; }
  /// Poisson variate by counting unit-rate exponential gaps in [0, mean]. Exact, O(mean).
  std::uint64_t poisson(double mean);
  /// Index of a categorical draw from cumulative (non-normalized) weights.
  std::size_t categorical(const double* cumulative, std::size_t n);

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint64_t trial_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace sinrldp
