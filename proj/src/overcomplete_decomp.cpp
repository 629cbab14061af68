#include "spectral/overcomplete_decomp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "spectral/errors.hpp"
#include "spectral/random.hpp"

namespace spectral {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kProbeStream = 0x47;  // 'G'
constexpr std::uint64_t kPowerSeedIndex = 1;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_unit(const Vector& u, const char* who) {
  const double defect = std::abs(u.norm() - 1.0);
  if (!(defect <= 1e-8)) throw PreconditionError(std::string(who) + ": vector is not unit norm", defect);
}

}  // namespace

std::size_t default_attempt_budget(std::size_t n) {
  const double logn = std::ceil(std::log(static_cast<double>(std::max<std::size_t>(n, 1))));
  return 200 * n * static_cast<std::size_t>(std::max(1.0, logn));
}

double check_threshold(std::size_t n, std::size_t d, double kappa) {
  const double raw = kappa * static_cast<double>(n) / std::pow(static_cast<double>(d), 1.5);
  return std::clamp(raw, 0.01, 0.3);
}

void DecompConfig::validate() const {
  if (!(kappa > 0.0)) throw ArgumentError("DecompConfig: kappa must be positive");
  if (!(dedup_cos2 > 0.0 && dedup_cos2 < 1.0)) throw ArgumentError("DecompConfig: dedup_cos2 must lie in (0, 1)");
  if (refine_iters < 0) throw ArgumentError("DecompConfig: refine_iters must be >= 0");
  if (workers < 1) throw ArgumentError("DecompConfig: workers must be >= 1");
  if (!(time_budget_s >= 0.0)) throw ArgumentError("DecompConfig: time_budget_s must be >= 0");
  settings.validate();
}

ProbeOperator::ProbeOperator(const Tensor3& t, const Vector& g)
    : tensor_(t), d_(t.dim()), precond_(t.dim()) {
  const auto d = static_cast<Eigen::Index>(d_);
  if (g.size() != d) throw ArgumentError("ProbeOperator: probe length does not match tensor dimension");
  if (!g.allFinite()) throw NumericError("ProbeOperator: probe has non-finite entries");
  const Eigen::RowVectorXd gt = g.transpose() * t.mode1_view();
  probe_ = ConstRowMap(gt.data(), d, d);
}

Vector ProbeOperator::apply(const Vector& v) const {
  const auto d = static_cast<Eigen::Index>(d_);
  if (v.size() != d * d)
    throw ArgumentError("fast_matvec_M: vector length " + std::to_string(v.size()) + " is not d^2 = " +
                        std::to_string(d * d));
  if (!v.allFinite()) throw NumericError("fast_matvec_M: input has non-finite entries");

  ConstRowMap vm(v.data(), d, d);
  RowMatrix z(d * d, d);
  z.noalias() = tensor_.pairs_by_last_view() * probe_;
  RowMatrix x(d * d, d);
  for (Eigen::Index p = 0; p < d; ++p) x.middleRows(p * d, d).noalias() = vm.transpose() * z.middleRows(p * d, d);

  Vector out(d * d);
  RowMap om(out.data(), d, d);
  om.noalias() = ConstRowMap(x.data(), d, d * d) * tensor_.mode1_view().transpose();
  return out;
}

Vector ProbeOperator::apply_preconditioned(const Vector& v) const {
  return precond_.apply(apply(precond_.apply(v)));
}

Vector fast_matvec_M(const Tensor3& t, const Vector& g, const Vector& v) { return ProbeOperator(t, g).apply(v); }

CubicCheck cubic_check(const Tensor3& t, const Vector& u, double threshold) {
  if (u.size() != static_cast<Eigen::Index>(t.dim())) throw ArgumentError("cubic_check: dimension mismatch");
  require_unit(u, "cubic_check");
  const double value = t.multilinear(u, u, u);
  return {value, value >= 1.0 - threshold};
}

AttemptOutcome attempt(const Tensor3& t, std::size_t n, const DecompConfig& cfg, std::uint64_t attempt_seed) {
  if (n < 1) throw ArgumentError("attempt: n must be >= 1");
  const std::size_t d = t.dim();
  const auto di = static_cast<Eigen::Index>(d);
  AttemptOutcome out;
  out.g_seed = attempt_seed;

  auto start = Clock::now();
  RandomStream probe_rng(attempt_seed, kProbeStream);
  const Vector g = probe_rng.normal_vector(di);
  const ProbeOperator op(t, g);
  PowerIterSettings settings = cfg.settings;
  settings.seed = derive_seed(attempt_seed, kPowerSeedIndex);
  out.report = power_iteration([&op](const Vector& v) { return op.apply_preconditioned(v); }, d * d, settings);
  const double phi_dot = out.report.eigvec.dot(phi_vector(d));
  out.phi_overlap = phi_dot * phi_dot / static_cast<double>(d);
  out.iterate_ms = ms_since(start);
  if (!out.report.converged) return out;

  start = Clock::now();
  const SymPreconditioner precond(d);
  const Matrix u = reshape_vec_to_matrix(precond.apply(out.report.eigvec), d);
  const auto pairs = top_singular_pairs(u, std::min<std::size_t>(2, d));
  for (const auto& p : pairs) {
    out.candidates.push_back(p.left);
    out.candidates.push_back(-p.left);
  }
  for (const auto& p : pairs) {
    out.candidates.push_back(p.right);
    out.candidates.push_back(-p.right);
  }
  const double threshold = check_threshold(n, d, cfg.kappa);
  for (const Vector& c : out.candidates) {
    const CubicCheck check = cubic_check(t, c, threshold);
    if (check.pass) {
      out.accepted = c;
      out.accepted_value = check.value;
      break;
    }
  }
  out.extract_ms = ms_since(start);
  return out;
}

Vector refine_power_iteration(const Tensor3& t, const Vector& u0, int iters) {
  if (u0.size() != static_cast<Eigen::Index>(t.dim())) throw ArgumentError("refine_power_iteration: dimension mismatch");
  require_unit(u0, "refine_power_iteration");
  Vector u = u0;
  double value = t.multilinear(u, u, u);
  for (int it = 0; it < iters; ++it) {
    Vector next = t.contract_last_two(u, u);
    const double norm = next.norm();
    if (norm == 0.0 || !std::isfinite(norm)) return u0;
    next /= norm;
    const double next_value = t.multilinear(next, next, next);
    if (next_value < value) return u;
    u = std::move(next);
    value = next_value;
  }
  return u;
}

namespace {

std::size_t best_match(const Matrix& truth_unit, const Vector& v, double& cos) {
  const Vector dots = (truth_unit.transpose() * v).cwiseAbs();
  Eigen::Index idx = 0;
  cos = dots.maxCoeff(&idx);
  return static_cast<std::size_t>(idx);
}

}  // namespace

DecompResult decompose_all(const Tensor3& t, std::size_t n, const DecompConfig& cfg, std::uint64_t run_seed,
                           const Matrix* truth) {
  cfg.validate();
  if (n < 1) throw ArgumentError("decompose_all: n must be >= 1");
  if (truth && truth->rows() != static_cast<Eigen::Index>(t.dim()))
    throw ArgumentError("decompose_all: ground-truth components have wrong dimension");

  const std::size_t budget = cfg.max_attempts > 0 ? cfg.max_attempts : default_attempt_budget(n);
  const auto start = Clock::now();
  Matrix truth_unit;
  DecompResult result;
  if (truth) {
    truth_unit = truth->colwise().normalized();
    result.report.best_correlations.assign(static_cast<std::size_t>(truth->cols()), 0.0);
  }
  auto& rep = result.report;

  std::size_t next = 0;
  std::vector<AttemptOutcome> batch;
  while (result.components.size() < n && next < budget) {
    if (cfg.time_budget_s > 0.0 && ms_since(start) >= 1000.0 * cfg.time_budget_s) {
      rep.timed_out = true;
      break;
    }
    const std::size_t width = std::min<std::size_t>(cfg.workers, budget - next);
    batch.assign(width, AttemptOutcome{});
    if (width == 1) {
      batch[0] = attempt(t, n, cfg, derive_seed(run_seed, next));
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(width);
      for (std::size_t w = 0; w < width; ++w)
        pool.emplace_back([&, w] { batch[w] = attempt(t, n, cfg, derive_seed(run_seed, next + w)); });
    }
    next += width;

    // Fold in attempt order so the result does not depend on the worker count.
    for (AttemptOutcome& out : batch) {
      if (result.components.size() >= n) break;
      ++rep.attempts_used;
      rep.power_iters += static_cast<std::size_t>(out.report.iters_used);
      rep.iterate_ms += out.iterate_ms;
      rep.extract_ms += out.extract_ms;
      rep.phi_overlaps.push_back(out.phi_overlap);
      if (!out.report.converged) ++rep.nonconverged_attempts;
      if (!out.accepted) continue;
      ++rep.accepted_attempts;
      rep.accepted_gap_ratios.push_back(out.report.gap_ratio);
      const Vector& v = *out.accepted;
      const auto novel = [&](const Vector& x) {
        return std::all_of(result.components.begin(), result.components.end(), [&](const Vector& s) {
          const double c = s.dot(x);
          return c * c <= cfg.dedup_cos2;
        });
      };
      if (!novel(v)) continue;
      Vector refined = refine_power_iteration(t, v, cfg.refine_iters);
      // A refined vector that drifted onto a member of S would break the pairwise bound; keep v then.
      if (!novel(refined)) refined = v;
      if (truth) {
        double before = 0.0;
        const std::size_t j = best_match(truth_unit, v, before);
        const double after = std::abs(truth_unit.col(static_cast<Eigen::Index>(j)).dot(refined));
        rep.refinements.push_back({j, before, after});
      }
      result.components.push_back(std::move(refined));
    }
  }
  rep.exhausted = result.components.size() < n && !rep.timed_out;

  if (truth) {
    for (const Vector& b : result.components) {
      const Vector dots = (truth_unit.transpose() * b).cwiseAbs();
      for (Eigen::Index i = 0; i < dots.size(); ++i)
        rep.best_correlations[static_cast<std::size_t>(i)] =
            std::max(rep.best_correlations[static_cast<std::size_t>(i)], dots(i));
    }
  }
  return result;
}

}  // namespace spectral
