#include "sinrldp/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sinrldp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose)
    : trial_(trial) {
  const std::uint64_t k = mix64(seed ^ mix64(static_cast<std::uint64_t>(purpose)));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void RngStream::refill() {
  const Philox4x32::Counter ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(trial_), static_cast<std::uint32_t>(trial_ >> 32)};
  const Philox4x32::Counter out = Philox4x32::block(ctr, key_);
  ++block_;
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  available_ = 2;
}

RngStream::result_type RngStream::operator()() {
  if (available_ == 0) refill();
  return buffer_[2 - available_--];
}

double RngStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::uint64_t n = 0;
  double t = exponential(1.0);
  while (t <= mean) {
    ++n;
    t += exponential(1.0);
  }
  return n;
}

std::size_t RngStream::categorical(const double* cumulative, std::size_t n) {
  const double u = uniform() * cumulative[n - 1];
  const double* it = std::upper_bound(cumulative, cumulative + n, u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative), n - 1);
}

}  // namespace sinrldp
