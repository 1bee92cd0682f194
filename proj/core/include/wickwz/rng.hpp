#pragma once

#include <cstdint>

namespace wickwz {

/// SplitMix64 finalizer; also used to derive per-path keys from a master seed.
uint64_t splitmix64(uint64_t x);

/// Per-path seed, hash(master_seed, path_index). Paths keep the same stream
/// no matter how the ensemble is scheduled across threads.
uint64_t derive_seed(uint64_t master_seed, uint64_t path_index);

/// Inverse of the standard normal CDF (Wichura's rational approximations),
/// accurate to ~1e-15 over (0,1). Sampling through the inverse CDF keeps
/// Gaussian streams bit-reproducible across platforms, unlike
/// std::normal_distribution.
double inverse_normal_cdf(double p);

/// Counter-based deterministic generator: output i is a pure function of
/// (key, i), so streams can be replayed or skipped without touching state
/// beyond the counter.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(splitmix64(key ^ 0x5851f42d4c957f2dULL)) {}

  uint64_t next_u64() { return splitmix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform in the open interval (0, 1): 53-bit mantissa, offset by half an ulp.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() { return inverse_normal_cdf(next_uniform()); }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace wickwz
