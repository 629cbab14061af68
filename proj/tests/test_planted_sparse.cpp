#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "spectral/errors.hpp"
#include "spectral/instances.hpp"
#include "spectral/planted_sparse.hpp"
#include "spectral/random.hpp"

using namespace spectral;

namespace {

Matrix naive_leverage(const Matrix& w) {
  const double n = static_cast<double>(w.rows()), d = static_cast<double>(w.cols());
  Matrix out = Matrix::Zero(w.cols(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double norm2 = 0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) norm2 += w(i, j) * w(i, j);
    for (Eigen::Index r = 0; r < w.cols(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) out(r, c) += (norm2 - d / n) * w(i, r) * w(i, c);
  }
  return out;
}

double median_corr(std::size_t n, std::size_t d, double eps, int seeds) {
  std::vector<double> c;
  for (int s = 1; s <= seeds; ++s) {
    const auto inst = gen_planted_sparse(n, d, eps, static_cast<std::uint64_t>(s));
    c.push_back(*recover_sparse_vector(inst.basis, {}, &inst.planted).correlation_sq);
  }
  std::nth_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2), c.end());
  return c[c.size() / 2];
}

}  // namespace

TEST(CenteredLeverage, EqualRowNormsGiveZero) {
  RandomStream rng(1, 1);
  const Matrix q = haar_orthogonal(4, rng);
  Matrix w(8, 4);
  w << q, q;
  w /= std::sqrt(2.0);
  EXPECT_LE(centered_leverage_matrix(w).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CenteredLeverage, HandComputed) {
  Matrix w = Matrix::Zero(3, 1);
  w(0, 0) = 1;
  EXPECT_NEAR(centered_leverage_matrix(w)(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(CenteredLeverage, MatchesNaiveOracle) {
  RandomStream rng(2, 2);
  Matrix g(8, 3);
  for (Eigen::Index j = 0; j < 3; ++j) g.col(j) = rng.normal_vector(8);
  const Matrix w = orthonormalize_columns(g);
  const Matrix a = centered_leverage_matrix(w);
  EXPECT_LE((a - naive_leverage(w)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(a, a.transpose());
}

TEST(CenteredLeverage, TraceIdentity) {
  const auto inst = gen_planted_sparse(3000, 12, 0.02, 8);
  const double n = 3000, d = 12;
  const double fourth = inst.basis.rowwise().squaredNorm().array().square().sum();
  EXPECT_NEAR(centered_leverage_matrix(inst.basis).trace(), fourth - d * d / n, 1e-10);
}

TEST(CenteredLeverage, RejectsNonOrthonormal) {
  Matrix w = Matrix::Zero(4, 2);
  w(0, 0) = 1;
  w(1, 1) = 1.1;
  try {
    centered_leverage_matrix(w);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NEAR(e.measured(), 0.21, 1e-12);
  }
}

TEST(CenteredLeverage, ImplicitMatchesExplicit) {
  const auto inst = gen_planted_sparse(2000, 15, 0.05, 4);
  const Matrix a = centered_leverage_matrix(inst.basis);
  const Vector weights = centered_leverage_weights(inst.basis);
  const LinearOperator op = centered_leverage_operator(inst.basis, weights);
  RandomStream rng(3, 3);
  for (int probe = 0; probe < 5; ++probe) {
    const Vector x = rng.normal_vector(15);
    EXPECT_LE((op(x) - a * x).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RecoverSparse, OneDimensional) {
  const auto inst = gen_planted_sparse(50, 1, 0.1, 2);
  const auto res = recover_sparse_vector(inst.basis, {}, &inst.planted);
  EXPECT_NEAR(*res.correlation_sq, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(res.recovered.dot(inst.basis.col(0))), 1.0, 1e-12);
}

TEST(RecoverSparse, BasisInvariance) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = gen_planted_sparse(3000, 20, 0.02, seed);
    RandomStream rng(seed, 99);
    const Matrix q = haar_orthogonal(20, rng);
    const Matrix wq = inst.basis * q;
    const auto r1 = recover_sparse_vector(inst.basis, {});
    const auto r2 = recover_sparse_vector(wq, {});
    const double err = std::min((r1.recovered - r2.recovered).norm(), (r1.recovered + r2.recovered).norm());
    EXPECT_LE(err, 1e-6) << "seed " << seed;
  }
}

TEST(RecoverSparse, PathsAgree) {
  const auto inst = gen_planted_sparse(4000, 25, 0.02, 6);
  PowerIterSettings s;
  s.seed = 3;
  const auto e = recover_sparse_vector(inst.basis, s, &inst.planted, MatvecPath::explicit_matrix);
  const auto i = recover_sparse_vector(inst.basis, s, &inst.planted, MatvecPath::implicit_operator);
  EXPECT_LE((e.recovered - i.recovered).norm(), 1e-8);
  EXPECT_NEAR(e.report.eigval, i.report.eigval, 1e-10 * std::abs(e.report.eigval));
}

TEST(RecoverSparse, ResultShape) {
  const auto inst = gen_planted_sparse(1000, 10, 0.05, 1);
  const auto res = recover_sparse_vector(inst.basis, {}, &inst.planted);
  EXPECT_NEAR(res.recovered.norm(), 1.0, 1e-12);
  EXPECT_NEAR(res.coeff_vec.norm(), 1.0, 1e-12);
  EXPECT_LE((inst.basis * res.coeff_vec - res.recovered).norm(), 1e-12);
  Eigen::Index idx;
  res.recovered.cwiseAbs().maxCoeff(&idx);
  EXPECT_GT(res.recovered(idx), 0.0);
  EXPECT_FALSE(recover_sparse_vector(inst.basis, {}).correlation_sq.has_value());
}

TEST(RecoverSparse, SparserIsEasier) {
  EXPECT_GE(median_corr(10000, 50, 0.01, 20), median_corr(10000, 50, 0.2, 20));
}
