#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>

#include "spectral/linalg.hpp"
#include "spectral/tensor3.hpp"
#include "spectral/tensor_core.hpp"

namespace spectral {

/// Streaming accumulation of M = Σ_i Tr(T_i)·T_i over first-mode slices.
/// Holds O(d²) state; slices may arrive in any order, each exactly once.
class PartialTraceAccumulator {
 public:
  explicit PartialTraceAccumulator(std::size_t dim);

  /// Slice T_i as d² row-major entries (j, k) -> t(i, j, k).
  void add_slice(std::span<const double> slice);
  std::size_t slices_seen() const noexcept { return seen_; }
  /// (M + Mᵀ)/2. Throws ArgumentError unless exactly d slices were added.
  Matrix finish() const;

 private:
  std::size_t dim_;
  std::size_t seen_ = 0;
  RowMatrix sum_;  // same storage order as the slices
};

/// Σ_i Tr(T_i)·T_i over first-mode slices, symmetrized. O(d³) time, O(d²) extra space.
Matrix partial_trace_matrix(const Tensor3& t);

/// Same from the slice-major stream: u64 LE d, then d slices of d² LE float64.
Matrix partial_trace_matrix(std::istream& in);

/// Writes t in the slice-major stream layout.
void write_slice_stream(std::ostream& out, const Tensor3& t);

struct TpcaResult {
  Vector recovered;
  PowerIterReport report;
  /// ⟨v, v'⟩ with the sign of v' resolved by the cubic form.
  std::optional<double> correlation;
  double build_ms = 0.0;
  double iterate_ms = 0.0;
};

/// Top eigenvector of partial_trace_matrix(t); sign s ∈ {±1} chosen to maximize T(sv', sv', sv').
TpcaResult recover_spike(const Tensor3& t, const PowerIterSettings& settings, const Vector* spike = nullptr);

/// Benchmark success cutoff on ⟨v, v'⟩.
inline constexpr double kTpcaSuccessCorrelation = 0.9;

/// τ = scale · d^{3/4} · sqrt(ln d).
double tpca_tau(std::size_t d, double scale);

}  // namespace spectral
