#include "spectral/instances.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "spectral/errors.hpp"

namespace spectral {

namespace {

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

std::string_view to_string(BasisMode mode) noexcept { return mode == BasisMode::good ? "good" : "rotated"; }

BasisMode basis_mode_from_string(std::string_view name) {
  if (name == "rotated") return BasisMode::rotated;
  if (name == "good") return BasisMode::good;
  throw ArgumentError("unknown basis mode '" + std::string(name) + "' (expected rotated|good)");
}

std::size_t planted_support_size(std::size_t n, double epsilon) {
  return static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n) + 1e-9));
}

Matrix orthonormalize_columns(const Matrix& m) {
  Matrix q = m;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double original = q.col(j).norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < j; ++p) q.col(j) -= q.col(p).dot(q.col(j)) * q.col(p);
    const double norm = q.col(j).norm();
    if (!(norm > 1e-10 * original) || norm == 0.0)
      throw NumericError("orthonormalize_columns: column " + std::to_string(j) + " is numerically dependent");
    q.col(j) /= norm;
  }
  return q;
}

Matrix haar_orthogonal(std::size_t d, RandomStream& rng) {
  Matrix g(as_index(d), as_index(d));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  return orthonormalize_columns(g);
}

SubspaceInstance gen_planted_sparse(std::size_t n, std::size_t d, double epsilon, std::uint64_t seed,
                                    BasisMode mode) {
  if (d < 1) throw ArgumentError("gen_planted_sparse: d must be >= 1");
  if (d > n) throw ArgumentError("gen_planted_sparse: d=" + std::to_string(d) + " exceeds n=" + std::to_string(n));
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ArgumentError("gen_planted_sparse: epsilon must lie in (0, 1]");
  const std::size_t k = planted_support_size(n, epsilon);
  if (k == 0) throw ArgumentError("gen_planted_sparse: floor(epsilon*n) is zero");

  SubspaceInstance inst;
  inst.n = n;
  inst.d = d;
  inst.epsilon = epsilon;
  inst.seed = seed;
  inst.basis_mode = mode;

  // Uniform k-subset by a partial Fisher–Yates shuffle.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  RandomStream support_rng(seed, streams::kSupport);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + support_rng.below(n - i)]);

  RandomStream sign_rng(seed, streams::kSigns);
  const double magnitude = 1.0 / std::sqrt(static_cast<double>(k));
  inst.planted = Vector::Zero(as_index(n));
  for (std::size_t i = 0; i < k; ++i)
    inst.planted(as_index(idx[i])) = (sign_rng.next_u64() >> 63) != 0 ? -magnitude : magnitude;

  inst.hidden_good_basis.resize(as_index(n), as_index(d));
  inst.hidden_good_basis.col(0) = inst.planted;
  const double stddev = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t c = 1; c < d; ++c) {
    RandomStream rng(seed, streams::kVectorBase + c);
    inst.hidden_good_basis.col(as_index(c)) = rng.normal_vector(as_index(n), stddev);
  }

  inst.basis = orthonormalize_columns(inst.hidden_good_basis);
  if (mode == BasisMode::rotated) {
    RandomStream rot_rng(seed, streams::kRotation);
    inst.basis = inst.basis * haar_orthogonal(d, rot_rng);
  }
  return inst;
}

DecompInstance gen_overcomplete(std::size_t d, std::size_t n, std::uint64_t seed) {
  if (d < 2) throw ArgumentError("gen_overcomplete: d must be >= 2");
  if (n < 1) throw ArgumentError("gen_overcomplete: n must be >= 1");
  DecompInstance inst;
  inst.d = d;
  inst.n = n;
  inst.seed = seed;
  inst.components.resize(as_index(d), as_index(n));
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t l = 0; l < n; ++l) {
    RandomStream rng(seed, streams::kVectorBase + l);
    inst.components.col(as_index(l)) = rng.normal_vector(as_index(d), stddev);
  }
  inst.tensor = Tensor3::from_components(inst.components);
  return inst;
}

Tensor3 spiked_noise(std::size_t d, std::uint64_t seed) {
  if (d < 2) throw ArgumentError("spiked_noise: d must be >= 2");
  Tensor3 noise(d, false);
  RandomStream rng(seed, streams::kNoise);
  for (double& e : noise.entries()) e = rng.normal();
  return noise;
}

SpikeInstance gen_spiked(std::size_t d, double tau, std::uint64_t seed) {
  if (d < 2) throw ArgumentError("gen_spiked: d must be >= 2");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ArgumentError("gen_spiked: tau must be finite and >= 0");
  SpikeInstance inst;
  inst.d = d;
  inst.tau = tau;
  inst.seed = seed;
  RandomStream rng(seed, streams::kSpike);
  inst.spike = rng.normal_vector(as_index(d)).normalized();
  inst.tensor = spiked_noise(d, seed);
  const Vector& v = inst.spike;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double vij = tau * v(as_index(i)) * v(as_index(j));
      for (std::size_t k = 0; k < d; ++k) inst.tensor(i, j, k) += vij * v(as_index(k));
    }
  return inst;
}

}  // namespace spectral
