#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spectral/linalg.hpp"
#include "spectral/tensor3.hpp"
#include "spectral/tensor_core.hpp"

namespace spectral {

/// Attempt budget 200·n·⌈ln n⌉ (at least 200).
std::size_t default_attempt_budget(std::size_t n);

/// Acceptance slack c(n,d) = κ·n/d^{3/2}, clamped to [0.01, 0.3].
double check_threshold(std::size_t n, std::size_t d, double kappa);

struct DecompConfig {
  double kappa = 1.0;
  /// 0 selects default_attempt_budget(n).
  std::size_t max_attempts = 0;
  double dedup_cos2 = 0.5;
  int refine_iters = 20;
  PowerIterSettings settings{.max_iters = 300, .rq_tolerance = 1e-6, .seed = 0, .estimate_second = true};
  /// Attempts evaluated concurrently; results are folded in attempt order.
  unsigned workers = 1;
  /// Wall-clock cap in seconds; 0 means none.
  double time_budget_s = 0.0;

  void validate() const;
};

/// Computes M v for M = Σ_{i,j} ⟨g, T(a_i⊗a_j)⟩ (a_i⊗a_j)(a_i⊗a_j)ᵀ using only
/// the tensor: M v is the flattening of T(Id, V, G)·T₁ᵀ, where V is the
/// reshaping of v, G that of gᵀT₁, and T₁ the mode-1 flattening.
///
/// Per call: Z = T_{(12),3}·G (d²×d by d×d), then one d×d product per
/// first-mode block (X_p = Vᵀ Z_p), then X₁·T₁ᵀ (d×d² by d²×d). O(d⁴) work.
class ProbeOperator {
 public:
  ProbeOperator(const Tensor3& t, const Vector& g);

  std::size_t dim() const noexcept { return d_; }
  /// M v.
  Vector apply(const Vector& v) const;
  /// R M R v with R the symmetric-subspace preconditioner.
  Vector apply_preconditioned(const Vector& v) const;

 private:
  const Tensor3& tensor_;
  std::size_t d_;
  RowMatrix probe_;  // G, d×d
  SymPreconditioner precond_;
};

/// One-shot form of ProbeOperator::apply.
Vector fast_matvec_M(const Tensor3& t, const Vector& g, const Vector& v);

struct CubicCheck {
  double value;
  bool pass;
};

/// value = T(u,u,u); pass iff value ≥ 1 − threshold. Requires |‖u‖ − 1| ≤ 1e-8.
CubicCheck cubic_check(const Tensor3& t, const Vector& u, double threshold);

struct AttemptOutcome {
  /// ±left σ1, ±left σ2, ±right σ1, ±right σ2 (fewer when d < 2 or not converged).
  std::vector<Vector> candidates;
  std::optional<Vector> accepted;
  double accepted_value = 0.0;
  PowerIterReport report;
  std::uint64_t g_seed = 0;
  /// ⟨eigvec, Φ/‖Φ‖⟩², logged to spot a spurious Φ-aligned top eigenvector.
  double phi_overlap = 0.0;
  double iterate_ms = 0.0;
  double extract_ms = 0.0;
};

/// One randomized spectral attempt with probe g drawn from attempt_seed.
AttemptOutcome attempt(const Tensor3& t, std::size_t n, const DecompConfig& cfg, std::uint64_t attempt_seed);

/// Tensor power iteration u ← T(·,u,u)/‖T(·,u,u)‖ for `iters` steps. Stops and
/// returns the pre-step iterate if T(u,u,u) would decrease; returns u0 if T(·,u,u)=0.
Vector refine_power_iteration(const Tensor3& t, const Vector& u0, int iters);

struct RefinementRecord {
  std::size_t matched_component;
  double cos_before;
  double cos_after;
};

struct DecompReport {
  std::size_t attempts_used = 0;
  std::size_t accepted_attempts = 0;
  std::size_t nonconverged_attempts = 0;
  std::size_t power_iters = 0;
  bool exhausted = false;
  bool timed_out = false;
  std::vector<double> accepted_gap_ratios;
  std::vector<double> phi_overlaps;
  /// Evaluation only (ground truth supplied): best |cos| per true component.
  std::vector<double> best_correlations;
  /// Evaluation only: refinement effect on every added component.
  std::vector<RefinementRecord> refinements;
  double iterate_ms = 0.0;
  double extract_ms = 0.0;
};

struct DecompResult {
  std::vector<Vector> components;
  DecompReport report;
};

/// Repeated attempts with seeds derive_seed(run_seed, index). An accepted v joins S
/// iff ⟨v,s⟩² ≤ dedup_cos2 for every s already in S, and is then refined. Stops at
/// |S| = n, budget exhaustion, or the time budget. `truth` (d×n, columns a_i) is
/// used for evaluation only.
DecompResult decompose_all(const Tensor3& t, std::size_t n, const DecompConfig& cfg, std::uint64_t run_seed,
                           const Matrix* truth = nullptr);

}  // namespace spectral
