#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace spectral {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

/// Index of the pair (i, j) in R^{d^2}, second factor fastest.
inline constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t d) noexcept {
  return i * d + j;
}

/// Flattened a ⊗ b with the pair_index convention.
inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Φ = Σ e_i ⊗ e_i, whose d×d reshaping is the identity.
inline Vector phi_vector(std::size_t d) {
  Vector phi = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) phi(static_cast<Eigen::Index>(pair_index(i, i, d))) = 1.0;
  return phi;
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace spectral
