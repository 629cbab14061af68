#include "spectral/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spectral/errors.hpp"

namespace spectral::oracle {

DenseEigReport dense_eig(const Matrix& input) {
  if (input.rows() != input.cols()) throw ArgumentError("dense_eig: matrix must be square");
  const Eigen::Index m = input.rows();
  if (m > 4096) throw ArgumentError("dense_eig: size limited to 4096");

  double max_abs = 0.0, asym = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      max_abs = std::max(max_abs, std::abs(input(i, j)));
      asym = std::max(asym, std::abs(input(i, j) - input(j, i)));
    }
  if (asym > 1e-8 * std::max(max_abs, 1.0)) throw PreconditionError("dense_eig: input is not symmetric", asym);

  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(m, m);
  double fro = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) fro += a(i, j) * a(i, j);
  fro = std::sqrt(fro);

  const auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  DenseEigReport report;
  while (off_norm() > 1e-12 * fro && report.sweeps < 100) {
    ++report.sweeps;
    for (Eigen::Index p = 0; p < m - 1; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation zeroing a(p,q) (Golub & Van Loan, symmetric Schur).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  report.eigenvalues.resize(m);
  report.eigenvectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    report.eigenvalues(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    report.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return report;
}

Matrix naive_M(const Matrix& components, const Vector& g) {
  const Eigen::Index d = components.rows();
  const Eigen::Index n = components.cols();
  const double d4 = std::pow(static_cast<double>(d), 4);
  if (d4 > 1e7) throw ArgumentError("naive_M: d^4 = " + std::to_string(d4) + " exceeds the 1e7 guard");
  if (g.size() != d) throw ArgumentError("naive_M: g has wrong length");

  Matrix m = Matrix::Zero(d * d, d * d);
  std::vector<double> pair(static_cast<std::size_t>(d * d));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      // T(a_i ⊗ a_j) = Σ_l ⟨a_l, a_i⟩⟨a_l, a_j⟩ a_l
      double coef = 0.0;
      for (Eigen::Index l = 0; l < n; ++l) {
        double li = 0.0, lj = 0.0, lg = 0.0;
        for (Eigen::Index r = 0; r < d; ++r) {
          li += components(r, l) * components(r, i);
          lj += components(r, l) * components(r, j);
          lg += components(r, l) * g(r);
        }
        coef += li * lj * lg;
      }
      for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q)
          pair[static_cast<std::size_t>(p * d + q)] = components(p, i) * components(q, j);
      for (Eigen::Index r = 0; r < d * d; ++r)
        for (Eigen::Index c = 0; c < d * d; ++c)
          m(r, c) += coef * (pair[static_cast<std::size_t>(r)] * pair[static_cast<std::size_t>(c)]);
    }
  return m;
}

Matrix naive_partial_trace(const Matrix& m) {
  Eigen::Index d = 0;
  while ((d + 1) * (d + 1) <= m.rows()) ++d;
  if (m.rows() != m.cols() || d * d != m.rows()) throw ArgumentError("naive_partial_trace: side is not d^2");
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = 0; l < d; ++l)
      for (Eigen::Index i = 0; i < d; ++i) out(j, l) += m(i * d + j, i * d + l);
  return out;
}

Matrix naive_ptm(const Tensor3& t) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double tr = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) tr += t(i, j, j);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k) out(j, k) += tr * t(i, j, k);
  }
  return out;
}

namespace {

Matrix dense_sym_minus_phi(std::size_t d_, double phi_coeff) {
  const auto d = static_cast<Eigen::Index>(d_);
  Matrix r = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      // Π_sym e_i⊗e_j = (e_i⊗e_j + e_j⊗e_i)/2
      r(i * d + j, i * d + j) += 0.5;
      r(j * d + i, i * d + j) += 0.5;
    }
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) r(i * d + i, j * d + j) -= phi_coeff;
  return r;
}

}  // namespace

Matrix dense_preconditioner(std::size_t d) {
  const double dd = static_cast<double>(d);
  return dense_sym_minus_phi(d, (1.0 / dd) * (1.0 - std::sqrt(2.0 / (dd + 2.0))));
}

Matrix dense_two_sigma_pinv(std::size_t d) { return dense_sym_minus_phi(d, 1.0 / (static_cast<double>(d) + 2.0)); }

double Matching::min_cosine() const {
  if (cosines.empty()) return 0.0;
  return *std::min_element(cosines.begin(), cosines.end());
}

std::size_t Matching::matched_count(double threshold) const {
  return static_cast<std::size_t>(std::count_if(cosines.begin(), cosines.end(), [&](double c) { return c >= threshold; }));
}

Matching greedy_match(const std::vector<Vector>& truth, const std::vector<Vector>& found) {
  struct Pair {
    double cos;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(truth.size() * found.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t j = 0; j < found.size(); ++j) {
      const double denom = truth[i].norm() * found[j].norm();
      pairs.push_back({denom > 0.0 ? std::abs(truth[i].dot(found[j])) / denom : 0.0, i, j});
    }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.cos != b.cos) return a.cos > b.cos;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  Matching out;
  out.assignment.assign(truth.size(), std::nullopt);
  out.cosines.assign(truth.size(), 0.0);
  std::vector<bool> used(found.size(), false);
  for (const Pair& p : pairs) {
    if (out.assignment[p.i] || used[p.j]) continue;
    out.assignment[p.i] = p.j;
    out.cosines[p.i] = p.cos;
    used[p.j] = true;
  }
  return out;
}

}  // namespace spectral::oracle
