#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "spectral/linalg.hpp"
#include "spectral/random.hpp"
#include "spectral/tensor3.hpp"

namespace spectral {

enum class BasisMode { rotated, good };

std::string_view to_string(BasisMode mode) noexcept;
BasisMode basis_mode_from_string(std::string_view name);

/// Random subspace of R^n containing a planted sparse unit vector.
struct SubspaceInstance {
  std::size_t n = 0;
  std::size_t d = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  BasisMode basis_mode = BasisMode::rotated;
  /// Observable n×d orthonormal basis W.
  Matrix basis;
  /// Hidden planted vector v0.
  Vector planted;
  /// Hidden columns (v0, v1, …, v_{d−1}) before orthonormalization.
  Matrix hidden_good_basis;
};

/// T = Σ a_i^{⊗3}, a_i iid N(0, Id/d); components stored as columns (d × n).
struct DecompInstance {
  std::size_t d = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Matrix components;
  Tensor3 tensor;
};

/// T = τ v^{⊗3} + A with A iid N(0,1).
struct SpikeInstance {
  std::size_t d = 0;
  double tau = 0.0;
  std::uint64_t seed = 0;
  Vector spike;
  Tensor3 tensor;
};

/// Stream ids, part of the fixture format: changing one changes every instance.
namespace streams {
inline constexpr std::uint64_t kSupport = 1;
inline constexpr std::uint64_t kSigns = 2;
inline constexpr std::uint64_t kRotation = 3;
inline constexpr std::uint64_t kSpike = 4;
inline constexpr std::uint64_t kNoise = 5;
/// Per-vector streams: kVectorBase + index (v_i for subspaces, a_i for components).
inline constexpr std::uint64_t kVectorBase = 16;
}  // namespace streams

/// Support size ⌊εn⌋ (with a 1e-9 guard against representation error in εn).
std::size_t planted_support_size(std::size_t n, double epsilon);

SubspaceInstance gen_planted_sparse(std::size_t n, std::size_t d, double epsilon, std::uint64_t seed,
                                    BasisMode mode = BasisMode::rotated);
DecompInstance gen_overcomplete(std::size_t d, std::size_t n, std::uint64_t seed);
SpikeInstance gen_spiked(std::size_t d, double tau, std::uint64_t seed);

/// The noise tensor A of gen_spiked(d, ·, seed), regenerated from its stream.
Tensor3 spiked_noise(std::size_t d, std::uint64_t seed);

/// Modified Gram–Schmidt with one reorthogonalization pass. Throws NumericError
/// if the columns are numerically dependent.
Matrix orthonormalize_columns(const Matrix& m);

/// Haar-distributed d×d orthogonal matrix (Gram–Schmidt on a Gaussian matrix).
Matrix haar_orthogonal(std::size_t d, RandomStream& rng);

}  // namespace spectral
