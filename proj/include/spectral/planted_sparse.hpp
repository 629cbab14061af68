#pragma once

#include <optional>

#include "spectral/linalg.hpp"
#include "spectral/tensor_core.hpp"

namespace spectral {

/// How recover_sparse_vector applies A = Σ_i (‖a_i‖² − d/n) a_i a_iᵀ.
enum class MatvecPath {
  /// Explicit when settings.max_iters ≥ d: building A costs about nd², i.e. d implicit matvecs.
  automatic,
  /// Materialize the d×d matrix once, O(d²) per iteration.
  explicit_matrix,
  /// x ↦ Σ_i c_i ⟨a_i, x⟩ a_i, O(nd) per iteration.
  implicit_operator,
};

struct PsvResult {
  /// Su, sign-canonicalized (largest-magnitude entry positive).
  Vector recovered;
  /// u, the top eigenvector of A.
  Vector coeff_vec;
  PowerIterReport report;
  /// ⟨Su, v0⟩² when the planted vector was supplied.
  std::optional<double> correlation_sq;
  double build_ms = 0.0;
  double iterate_ms = 0.0;
  double extract_ms = 0.0;
};

/// Σ_i (‖a_i‖² − d/n) a_i a_iᵀ over the rows a_i of w, symmetrized after accumulation.
/// Throws PreconditionError when ‖wᵀw − Id‖_max > 1e-6.
Matrix centered_leverage_matrix(const Matrix& w);

/// Centering weights c_i = ‖a_i‖² − d/n.
Vector centered_leverage_weights(const Matrix& w);

/// Matrix-free x ↦ Σ_i c_i ⟨a_i, x⟩ a_i. Keeps references to w and weights.
LinearOperator centered_leverage_operator(const Matrix& w, const Vector& weights);

/// Orthonormality defect ‖wᵀw − Id‖_max.
double gram_residual(const Matrix& w);

/// Top eigenvector u of the centered leverage matrix, lifted to Su.
PsvResult recover_sparse_vector(const Matrix& w, const PowerIterSettings& settings,
                                const Vector* planted = nullptr, MatvecPath path = MatvecPath::automatic);

/// Benchmark failure cutoff on ⟨Su, v0⟩².
inline constexpr double kPsvSuccessCorrelationSq = 0.5;

}  // namespace spectral
