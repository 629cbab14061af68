#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spectral/linalg.hpp"

namespace spectral {

/// Dense order-3 tensor over R^d, stored with index (i, j, k) at (i*d + j)*d + k.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t dim, bool symmetric_hint = false);
  Tensor3(std::size_t dim, std::vector<double> entries, bool symmetric_hint = false);

  std::size_t dim() const noexcept { return dim_; }
  bool symmetric_hint() const noexcept { return symmetric_hint_; }
  void set_symmetric_hint(bool hint) noexcept { symmetric_hint_ = hint; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return entries_[(i * dim_ + j) * dim_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return entries_[(i * dim_ + j) * dim_ + k];
  }

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<double> entries() noexcept { return entries_; }

  /// First-mode slice T_i as a d×d view: (j, k) -> t(i, j, k).
  ConstRowMap slice(std::size_t i) const;

  /// Mode-1 flattening viewed in place (d × d², row i, column (j,k)).
  ConstRowMap mode1_view() const;
  /// The same storage viewed as d² × d (row (i,j), column k).
  ConstRowMap pairs_by_last_view() const;

  /// T(x, y, z) = Σ t(i,j,k) x_i y_j z_k.
  double multilinear(const Vector& x, const Vector& y, const Vector& z) const;
  /// T(·, y, z) as a vector in R^d.
  Vector contract_last_two(const Vector& y, const Vector& z) const;

  double frobenius_norm_sq() const noexcept;

  /// Σ_l a_l^{⊗3} over the columns of `components` (d × n).
  static Tensor3 from_components(const Matrix& components);
  /// τ · v^{⊗3}.
  static Tensor3 rank_one(const Vector& v, double tau = 1.0);

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  void copy_canonical_to_permutations() noexcept;

  std::size_t dim_ = 0;
  std::vector<double> entries_;
  bool symmetric_hint_ = false;
};

/// Flattening along `mode` (1, 2 or 3): rows indexed by that mode, columns by
/// the remaining two in their original order, later index fastest.
Matrix flatten3(const Tensor3& t, int mode);

/// d×d matrix with (i, j) = v[i*d + j]. Throws ArgumentError unless size == d².
Matrix reshape_vec_to_matrix(const Vector& v, std::size_t d);
/// Inverse of reshape_vec_to_matrix.
Vector flatten_matrix(const Matrix& m);

}  // namespace spectral
