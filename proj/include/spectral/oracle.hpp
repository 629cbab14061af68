#pragma once

// Slow reference implementations. Everything here is written from the
// defining index sums, without sharing code with the fast paths it checks.

#include <cstddef>
#include <optional>
#include <vector>

#include "spectral/linalg.hpp"
#include "spectral/tensor3.hpp"

namespace spectral::oracle {

struct DenseEigReport {
  /// Sorted descending.
  Vector eigenvalues;
  /// Column i pairs with eigenvalues(i).
  Matrix eigenvectors;
  int sweeps = 0;
};

/// Cyclic Jacobi until the off-diagonal Frobenius norm is ≤ 1e-12·‖a‖_F.
/// Throws PreconditionError if a is asymmetric beyond 1e-8 (relative to ‖a‖_max).
DenseEigReport dense_eig(const Matrix& a);

/// M = Σ_{i,j} ⟨g, T(a_i⊗a_j)⟩ (a_i⊗a_j)(a_i⊗a_j)ᵀ with T(a_i⊗a_j) = Σ_l ⟨a_l,a_i⟩⟨a_l,a_j⟩ a_l.
/// Components are the columns of `components`. Guard: d⁴ ≤ 10⁷.
Matrix naive_M(const Matrix& components, const Vector& g);

/// out(j,l) = Σ_i m(i*d+j, i*d+l), by explicit loops.
Matrix naive_partial_trace(const Matrix& m);

/// Σ_i (Σ_j t(i,j,j)) · t(i,·,·), by explicit loops, not symmetrized.
Matrix naive_ptm(const Tensor3& t);

/// Dense R = Π_sym − c_d ΦΦᵀ built entry by entry.
Matrix dense_preconditioner(std::size_t d);

/// Dense 2Σ⁺ = Π_sym − (1/(d+2)) ΦΦᵀ.
Matrix dense_two_sigma_pinv(std::size_t d);

struct Matching {
  /// For truth i, the matched index into `found`, or nullopt.
  std::vector<std::optional<std::size_t>> assignment;
  /// |⟨a_i, b_{π(i)}⟩| per truth vector (0 when unmatched).
  std::vector<double> cosines;

  double min_cosine() const;
  std::size_t matched_count(double threshold) const;
};

/// Greedy max-|cos| matching without replacement; ties go to the lower (truth, found) pair.
/// Inputs are normalized internally.
Matching greedy_match(const std::vector<Vector>& truth, const std::vector<Vector>& found);

}  // namespace spectral::oracle
