#include <gtest/gtest.h>

#include <cmath>

#include "spectral/errors.hpp"
#include "spectral/oracle.hpp"
#include "spectral/random.hpp"

using namespace spectral;
using namespace spectral::oracle;

TEST(DenseEig, Diagonal) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 2, 5, -1;
  const auto rep = dense_eig(a);
  EXPECT_EQ(rep.eigenvalues, Eigen::Vector3d(5, 2, -1));
  EXPECT_NEAR(std::abs(rep.eigenvectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(rep.eigenvectors(0, 1)), 1.0, 1e-15);
}

TEST(DenseEig, TwoByTwo) {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const auto rep = dense_eig(a);
  EXPECT_NEAR(rep.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(rep.eigenvalues(1), -1.0, 1e-14);
}

TEST(DenseEig, TraceIdentities) {
  RandomStream rng(1, 2);
  Matrix a(16, 16);
  for (Eigen::Index j = 0; j < 16; ++j) a.col(j) = rng.normal_vector(16);
  a = (a + a.transpose()).eval();
  const auto rep = dense_eig(a);
  EXPECT_NEAR(rep.eigenvalues.sum(), a.trace(), 1e-10);
  EXPECT_NEAR(rep.eigenvalues.squaredNorm(), a.squaredNorm(), 1e-10);
  const Matrix recon = rep.eigenvectors * rep.eigenvalues.asDiagonal() * rep.eigenvectors.transpose();
  EXPECT_LE((recon - a).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DenseEig, RejectsAsymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(dense_eig(a), PreconditionError);
}

TEST(NaiveM, RankOne) {
  RandomStream rng(3, 3);
  Matrix comp(4, 1);
  comp.col(0) = rng.normal_vector(4);
  const Vector a = comp.col(0), g = rng.normal_vector(4);
  const Vector aa = kron(a, a);
  const Matrix expect = g.dot(a) * std::pow(a.squaredNorm(), 2) * aa * aa.transpose();
  EXPECT_LE((naive_M(comp, g) - expect).cwiseAbs().maxCoeff(), 1e-12 * expect.cwiseAbs().maxCoeff());
}

TEST(NaiveM, ExactlySymmetric) {
  RandomStream rng(4, 4);
  Matrix comp(4, 3);
  for (Eigen::Index j = 0; j < 3; ++j) comp.col(j) = rng.normal_vector(4);
  const Matrix m = naive_M(comp, rng.normal_vector(4));
  EXPECT_EQ((m - m.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(NaiveM, SizeGuard) {
  EXPECT_THROW(naive_M(Matrix::Zero(60, 2), Vector::Zero(60)), ArgumentError);
}

TEST(GreedyMatch, Identity) {
  const std::vector<Vector> truth{Vector::Unit(3, 0), Vector::Unit(3, 1)};
  const auto m = greedy_match(truth, truth);
  EXPECT_EQ(m.assignment[0], 0u);
  EXPECT_EQ(m.assignment[1], 1u);
  EXPECT_EQ(m.cosines, (std::vector<double>{1.0, 1.0}));
}

TEST(GreedyMatch, SignBlindPermutation) {
  const std::vector<Vector> truth{Vector::Unit(3, 0), Vector::Unit(3, 1)};
  const std::vector<Vector> found{-Vector::Unit(3, 1), Vector::Unit(3, 0)};
  const auto m = greedy_match(truth, found);
  EXPECT_EQ(m.assignment[0], 1u);
  EXPECT_EQ(m.assignment[1], 0u);
  EXPECT_EQ(m.min_cosine(), 1.0);
}

TEST(GreedyMatch, PerturbedTruth) {
  RandomStream rng(5, 5);
  std::vector<Vector> truth, found;
  for (int i = 0; i < 5; ++i) {
    truth.push_back(rng.normal_vector(10).normalized());
    found.push_back((truth.back() + 0.01 * rng.normal_vector(10)).normalized());
  }
  const auto m = greedy_match(truth, found);
  EXPECT_GE(m.min_cosine(), 0.999);
  EXPECT_EQ(m.matched_count(0.999), 5u);
}

TEST(GreedyMatch, FewerFoundThanTruth) {
  const std::vector<Vector> truth{Vector::Unit(2, 0), Vector::Unit(2, 1)};
  const auto m = greedy_match(truth, {Vector::Unit(2, 1)});
  EXPECT_FALSE(m.assignment[0].has_value());
  EXPECT_EQ(m.cosines[0], 0.0);
  EXPECT_EQ(m.matched_count(0.9), 1u);
}

TEST(NaivePartialTrace, RejectsNonSquareSide) {
  EXPECT_THROW(naive_partial_trace(Matrix::Zero(3, 3)), ArgumentError);
}
