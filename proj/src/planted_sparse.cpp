#include "spectral/planted_sparse.hpp"

#include <chrono>
#include <string>

#include "spectral/errors.hpp"

namespace spectral {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_orthonormal(const Matrix& w, const char* who) {
  if (w.cols() < 1 || w.cols() > w.rows())
    throw ArgumentError(std::string(who) + ": need 1 <= d <= n, got " + std::to_string(w.rows()) + "x" +
                        std::to_string(w.cols()));
  if (const double r = gram_residual(w); !(r <= 1e-6))
    throw PreconditionError(std::string(who) + ": columns are not orthonormal", r);
}

}  // namespace

double gram_residual(const Matrix& w) {
  const Matrix gram = w.transpose() * w;
  return (gram - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
}

Vector centered_leverage_weights(const Matrix& w) {
  const double centre = static_cast<double>(w.cols()) / static_cast<double>(w.rows());
  return (w.rowwise().squaredNorm().array() - centre).matrix();
}

Matrix centered_leverage_matrix(const Matrix& w) {
  require_orthonormal(w, "centered_leverage_matrix");
  const Vector c = centered_leverage_weights(w);
  Matrix a = w.transpose() * c.asDiagonal() * w;
  return 0.5 * (a + a.transpose());
}

LinearOperator centered_leverage_operator(const Matrix& w, const Vector& weights) {
  return [&w, &weights](const Vector& x) -> Vector {
    const Vector proj = (w * x).cwiseProduct(weights);
    return w.transpose() * proj;
  };
}

PsvResult recover_sparse_vector(const Matrix& w, const PowerIterSettings& settings, const Vector* planted,
                                MatvecPath path) {
  require_orthonormal(w, "recover_sparse_vector");
  if (planted && planted->size() != w.rows()) throw ArgumentError("recover_sparse_vector: planted vector has wrong length");
  const auto d = static_cast<std::size_t>(w.cols());
  if (path == MatvecPath::automatic)
    path = static_cast<std::size_t>(settings.max_iters) >= d ? MatvecPath::explicit_matrix : MatvecPath::implicit_operator;

  PsvResult result;
  auto start = Clock::now();
  const Vector weights = centered_leverage_weights(w);
  Matrix a;
  LinearOperator op;
  if (path == MatvecPath::explicit_matrix) {
    a = w.transpose() * weights.asDiagonal() * w;
    a = 0.5 * (a + a.transpose());
    op = [&a](const Vector& x) -> Vector { return a * x; };
  } else {
    op = centered_leverage_operator(w, weights);
  }
  result.build_ms = ms_since(start);

  start = Clock::now();
  result.report = power_iteration(op, d, settings);
  result.iterate_ms = ms_since(start);

  start = Clock::now();
  result.coeff_vec = result.report.eigvec;
  result.recovered = w * result.coeff_vec;
  const Vector raw = result.recovered;
  canonicalize_sign(result.recovered);
  if (raw.dot(result.recovered) < 0.0) result.coeff_vec = -result.coeff_vec;
  result.extract_ms = ms_since(start);

  if (planted) {
    const double c = result.recovered.dot(*planted);
    result.correlation_sq = c * c;
  }
  return result;
}

}  // namespace spectral
