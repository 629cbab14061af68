#pragma once

// Counter-based random streams.
//
// Generator: Philox4x32-10 (Salmon et al., Random123 constants), version 1.
// A stream is identified by (seed, stream id); block b of the stream is the
// Philox output for counter (b_lo, b_hi, stream_lo, stream_hi) under key
// (seed_lo, seed_hi). Each block yields two 64-bit words, low word first.
// Uniform doubles take the top 53 bits of a word; normals use Box–Muller
// with both outputs consumed in order (cos, then sin).

#include <array>
#include <cstdint>

#include "spectral/linalg.hpp"

namespace spectral {

inline constexpr int kRngVersion = 1;

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;
  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  Vector normal_vector(Eigen::Index size, double stddev = 1.0);

 private:
  void refill() noexcept;

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Child seed for the index-th sub-task of a run; stable across versions of this library.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace spectral
