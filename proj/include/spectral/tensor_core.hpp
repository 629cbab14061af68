#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "spectral/linalg.hpp"
#include "spectral/tensor3.hpp"

namespace spectral {

/// Black-box symmetric operator on R^m.
using LinearOperator = std::function<Vector(const Vector&)>;

/// Tr_{R^d} over the first tensor factor: out(j,l) = Σ_i m((i,j),(i,l)).
Matrix partial_trace_first(const Matrix& m);

/// R = Π_sym − c_d ΦΦᵀ with c_d = (1/d)(1 − sqrt(2/(d+2))); R = √2 (Σ⁺)^{1/2}
/// for Σ the fourth-moment matrix of a standard Gaussian. Never materialized.
class SymPreconditioner {
 public:
  explicit SymPreconditioner(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double coeff() const noexcept { return coeff_; }

  /// Π_sym v − c_d ⟨Φ, v⟩ Φ in O(d²).
  Vector apply(const Vector& v) const;

 private:
  std::size_t dim_;
  double coeff_;
};

inline Vector precondition_apply(const SymPreconditioner& r, const Vector& v) { return r.apply(v); }

struct PowerIterSettings {
  int max_iters = 1000;
  /// Stop once |ρ_k − ρ_{k−1}| ≤ rq_tolerance · |ρ_k| for the Rayleigh quotients ρ.
  double rq_tolerance = 1e-10;
  std::uint64_t seed = 0;
  /// Run the deflated pass that estimates λ2.
  bool estimate_second = true;

  void validate() const;
};

struct PowerIterReport {
  Vector eigvec;
  double eigval = 0.0;
  double second_eigval = 0.0;
  int iters_used = 0;
  /// |λ2| / |λ1|.
  double gap_ratio = 1.0;
  /// Rayleigh quotient reached tolerance and the spectrum is not degenerate.
  bool converged = false;
  std::vector<double> rq_history;
};

/// Dominant (largest-magnitude) eigenpair of a symmetric operator. The start
/// vector is iid normal from settings.seed; the eigenvector sign is fixed so the
/// largest-magnitude entry is positive. λ2 comes from one rerun on
/// x ↦ Ax − λ1⟨q,x⟩q.
PowerIterReport power_iteration(const LinearOperator& op, std::size_t m, const PowerIterSettings& settings);

/// Random-probe symmetry check: max over probes of
/// |⟨x,Ay⟩ − ⟨Ax,y⟩| / (‖x‖‖Ay‖ + ‖Ax‖‖y‖). Returns that defect.
double symmetry_defect(const LinearOperator& op, std::size_t m, std::uint64_t seed, int probes = 3);

/// Flip v so its largest-magnitude entry is positive (ties: lowest index).
void canonicalize_sign(Vector& v);

struct SingularTriple {
  double value;
  Vector left;
  Vector right;
};

/// Top-k singular triples via power iteration on UᵀU with deflation, sorted descending.
std::vector<SingularTriple> top_singular_pairs(const Matrix& u, std::size_t k);

}  // namespace spectral
