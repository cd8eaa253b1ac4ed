#pragma once

#include <cstdint>

namespace rsm {

/// Standard normal quantile via the Wichura PPND16 rational
/// approximation; absolute error below 1e-9 over (0, 1).
double normal_quantile(double probability);

/// Deterministic per-replication random stream. Replication r of a study
/// seeded with s always yields the same draws, independent of how many
/// other replications ran or in what order. Gaussians come from the
/// inverse CDF, so the stream is reproducible across platforms.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t replication);

  std::uint64_t next_bits();
  double uniform();   // open interval (0, 1)
  double gaussian();  // standard normal

 private:
  std::uint64_t state_;
};

}  // namespace rsm
