#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "amle/matrix.hpp"

namespace amle {

/// Reproducible Gaussian stream keyed by (master_seed, stream_id).
///
/// The sequence is fully specified so that it can be reproduced elsewhere:
///  - engine: std::mt19937_64 seeded with std::seed_seq over the four 32-bit
///    words {lo(master), hi(master), lo(stream), hi(stream)};
///  - uniforms: u = (engine() >> 11) * 2^-53, mapped to v = 2u - 1;
///  - normals: Marsaglia polar method on pairs (v1, v2), rejecting s = 0 and
///    s >= 1; each accepted pair yields v1*f first, then v2*f, with
///    f = sqrt(-2 ln(s) / s).
///
/// Value type: copying a NoiseSource forks an identical stream. Never share
/// one instance between concurrent consumers.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double uniform();  // [0, 1)
  double normal();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Next `count` standard normals from the stream.
Vector standard_normals(NoiseSource& noise, std::size_t count);

}  // namespace amle
