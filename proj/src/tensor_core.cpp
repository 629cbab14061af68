#include "spectral/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spectral/errors.hpp"
#include "spectral/random.hpp"

namespace spectral {

namespace {

constexpr double kDegenerateGap = 1.0 - 1e-9;
constexpr std::uint64_t kStartStream = 0x5354415254ull;     // "START"
constexpr std::uint64_t kDeflateSalt = 0x4445464c41544531ull;
constexpr std::uint64_t kProbeStream = 0x50524f4245ull;      // "PROBE"

std::size_t perfect_square_root(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n ? r : 0;
}

Vector checked_apply(const LinearOperator& op, const Vector& x) {
  Vector y = op(x);
  if (y.size() != x.size())
    throw ContractError("power_iteration: operator returned length " + std::to_string(y.size()) +
                        ", expected " + std::to_string(x.size()));
  if (!y.allFinite()) throw NumericError("power_iteration: operator produced non-finite values");
  return y;
}

struct PowerRun {
  Vector vec;
  double val = 0.0;
  int iters = 0;
  bool converged = false;
  std::vector<double> history;
};

PowerRun run_power(const LinearOperator& op, std::size_t m, int max_iters, double tol, std::uint64_t seed) {
  RandomStream rng(seed, kStartStream);
  PowerRun run;
  Vector x = rng.normal_vector(static_cast<Eigen::Index>(m));
  x.normalize();
  Vector y = checked_apply(op, x);
  run.iters = 1;
  double prev = std::numeric_limits<double>::quiet_NaN();
  while (true) {
    const double rq = x.dot(y);
    run.history.push_back(rq);
    const double ynorm = y.norm();
    if (ynorm == 0.0) {
      // x lies in the kernel; every vector is an eigenvector of the zero operator restricted here.
      run.vec = x;
      run.val = 0.0;
      run.converged = true;
      break;
    }
    if (std::isfinite(prev) && std::abs(rq - prev) <= tol * std::abs(rq)) {
      run.vec = x;
      run.val = rq;
      run.converged = true;
      break;
    }
    if (run.iters >= max_iters) {
      run.vec = x;
      run.val = rq;
      break;
    }
    prev = rq;
    x = y / ynorm;
    y = checked_apply(op, x);
    ++run.iters;
  }
  return run;
}

}  // namespace

Matrix partial_trace_first(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("partial_trace_first: matrix must be square");
  const std::size_t d = perfect_square_root(static_cast<std::size_t>(m.rows()));
  if (d == 0) throw ArgumentError("partial_trace_first: side " + std::to_string(m.rows()) + " is not a square d^2");
  const auto di = static_cast<Eigen::Index>(d);
  Matrix out = Matrix::Zero(di, di);
  for (Eigen::Index i = 0; i < di; ++i) out += m.block(i * di, i * di, di, di);
  return out;
}

SymPreconditioner::SymPreconditioner(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ArgumentError("SymPreconditioner: dimension must be positive");
  const double d = static_cast<double>(dim);
  coeff_ = (1.0 / d) * (1.0 - std::sqrt(2.0 / (d + 2.0)));
}

Vector SymPreconditioner::apply(const Vector& v) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (v.size() != d * d)
    throw ArgumentError("precondition_apply: length " + std::to_string(v.size()) + " does not match d^2 = " +
                        std::to_string(d * d));
  ConstRowMap vm(v.data(), d, d);
  Vector out(v.size());
  RowMap om(out.data(), d, d);
  om = 0.5 * (vm + vm.transpose());
  om.diagonal().array() -= coeff_ * vm.trace();
  return out;
}

void PowerIterSettings::validate() const {
  if (max_iters < 1) throw ArgumentError("PowerIterSettings: max_iters must be >= 1");
  if (!(rq_tolerance >= 0.0)) throw ArgumentError("PowerIterSettings: rq_tolerance must be >= 0");
}

void canonicalize_sign(Vector& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  if (v(best) < 0.0) v = -v;
}

double symmetry_defect(const LinearOperator& op, std::size_t m, std::uint64_t seed, int probes) {
  RandomStream rng(seed, kProbeStream);
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector x = rng.normal_vector(static_cast<Eigen::Index>(m));
    const Vector y = rng.normal_vector(static_cast<Eigen::Index>(m));
    const Vector ax = checked_apply(op, x);
    const Vector ay = checked_apply(op, y);
    const double scale = x.norm() * ay.norm() + ax.norm() * y.norm();
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(x.dot(ay) - ax.dot(y)) / scale);
  }
  return worst;
}

PowerIterReport power_iteration(const LinearOperator& op, std::size_t m, const PowerIterSettings& settings) {
  settings.validate();
  if (m == 0) throw ArgumentError("power_iteration: dimension must be >= 1");
#if !defined(NDEBUG) || defined(SPECTRAL_CHECK_SYMMETRY)
  if (const double defect = symmetry_defect(op, m, settings.seed, 2); defect > 1e-10)
    throw ContractError("power_iteration: operator is not symmetric (defect " + std::to_string(defect) + ")");
#endif

  PowerRun top = run_power(op, m, settings.max_iters, settings.rq_tolerance, settings.seed);
  PowerIterReport report;
  report.eigvec = std::move(top.vec);
  canonicalize_sign(report.eigvec);
  report.eigval = top.val;
  report.iters_used = top.iters;
  report.rq_history = std::move(top.history);

  if (settings.estimate_second && m > 1) {
    const Vector q = report.eigvec;
    const double lambda = report.eigval;
    const LinearOperator deflated = [&](const Vector& x) -> Vector { return op(x) - lambda * q.dot(x) * q; };
    const PowerRun second =
        run_power(deflated, m, settings.max_iters, settings.rq_tolerance, settings.seed ^ kDeflateSalt);
    report.second_eigval = second.val;
  } else {
    report.second_eigval = 0.0;
  }
  report.gap_ratio = report.eigval == 0.0 ? 1.0 : std::abs(report.second_eigval) / std::abs(report.eigval);
  const bool degenerate = settings.estimate_second && m > 1 && report.gap_ratio >= kDegenerateGap;
  report.converged = top.converged && !degenerate;
  return report;
}

std::vector<SingularTriple> top_singular_pairs(const Matrix& u, std::size_t k) {
  const auto rows = static_cast<std::size_t>(u.rows());
  const auto cols = static_cast<std::size_t>(u.cols());
  if (k < 1 || k > std::min(rows, cols))
    throw ArgumentError("top_singular_pairs: k=" + std::to_string(k) + " out of range [1, " +
                        std::to_string(std::min(rows, cols)) + "]");

  const Matrix gram = u.transpose() * u;
  const double scale = gram.norm();
  PowerIterSettings settings;
  settings.max_iters = 20000;
  settings.rq_tolerance = 1e-15;
  settings.estimate_second = false;

  std::vector<SingularTriple> triples;
  triples.reserve(k);
  for (std::size_t idx = 0; idx < k; ++idx) {
    // Deflate found right vectors completely: work in their orthogonal complement.
    const auto project_out = [&](Vector x) {
      for (const auto& t : triples) x -= t.right.dot(x) * t.right;
      return x;
    };
    const LinearOperator op = [&](const Vector& x) -> Vector { return project_out(gram * project_out(x)); };
    settings.seed = 0x53564431ull + idx;
    PowerIterReport rep = power_iteration(op, cols, settings);
    Vector right = project_out(rep.eigvec);
    double rn = right.norm();
    if (rn == 0.0 || rep.eigval <= 1e-30 * scale) {
      // Zero singular value: pick any unit vector orthogonal to the previous ones.
      for (std::size_t e = 0; e < cols && rn < 0.5; ++e) {
        right = project_out(Vector::Unit(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(e)));
        rn = right.norm();
      }
    }
    right /= rn;
    const Vector image = u * right;
    const double sigma = image.norm();
    Vector left;
    if (sigma > 0.0) {
      left = image / sigma;
    } else {
      left = Vector::Zero(static_cast<Eigen::Index>(rows));
      for (std::size_t e = 0; e < rows; ++e) {
        Vector cand = Vector::Unit(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(e));
        for (const auto& t : triples) cand -= t.left.dot(cand) * t.left;
        if (cand.norm() > 0.5) {
          left = cand.normalized();
          break;
        }
      }
    }
    triples.push_back({sigma, std::move(left), std::move(right)});
  }
  std::stable_sort(triples.begin(), triples.end(),
                   [](const SingularTriple& a, const SingularTriple& b) { return a.value > b.value; });
  return triples;
}

}  // namespace spectral
