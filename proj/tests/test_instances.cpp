#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "spectral/errors.hpp"
#include "spectral/instances.hpp"
#include "spectral/random.hpp"

using namespace spectral;

namespace {

double span_residual(const Matrix& basis, const Matrix& other) {
  // basis has orthonormal columns; residual of projecting other's columns onto span(basis)
  return (other - basis * (basis.transpose() * other)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(PlantedSparse, OneDimensionalSubspaceIsV0) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = gen_planted_sparse(16, 1, 0.25, seed);
    const double c = inst.basis.col(0).dot(inst.planted);
    EXPECT_NEAR(c * c, 1.0, 1e-14);
  }
}

TEST(PlantedSparse, Deterministic) {
  const auto a = gen_planted_sparse(500, 10, 0.05, 77);
  const auto b = gen_planted_sparse(500, 10, 0.05, 77);
  EXPECT_EQ(a.basis, b.basis);
  EXPECT_EQ(a.planted, b.planted);
  const auto c = gen_planted_sparse(500, 10, 0.05, 78);
  EXPECT_NE(a.planted, c.planted);
}

TEST(PlantedSparse, FourthMomentIsOneOverK) {
  const auto inst = gen_planted_sparse(2000, 20, 0.05, 5);
  const double l4 = inst.planted.array().pow(4).sum();
  EXPECT_NEAR(l4, 0.01, 1e-15);
}

TEST(PlantedSparse, Invariants) {
  for (BasisMode mode : {BasisMode::rotated, BasisMode::good}) {
    const auto inst = gen_planted_sparse(1000, 15, 0.03, 11, mode);
    const Eigen::Index k = static_cast<Eigen::Index>(planted_support_size(1000, 0.03));
    EXPECT_EQ(k, 30);
    EXPECT_EQ((inst.planted.array() != 0.0).count(), k);
    EXPECT_NEAR(inst.planted.norm(), 1.0, 1e-14);
    EXPECT_GE(inst.planted.array().pow(4).sum(), 1.0 / (0.03 * 1000) - 1e-12);
    EXPECT_LE((inst.basis.transpose() * inst.basis - Matrix::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(span_residual(inst.basis, inst.planted), 1e-10);
    EXPECT_LE(span_residual(inst.basis, inst.hidden_good_basis), 1e-9);
    const Matrix q = orthonormalize_columns(inst.hidden_good_basis);
    EXPECT_LE(span_residual(q, inst.basis), 1e-9);
  }
}

TEST(PlantedSparse, GoodModeKeepsV0AsFirstColumn) {
  const auto inst = gen_planted_sparse(400, 6, 0.1, 3, BasisMode::good);
  EXPECT_NEAR(std::abs(inst.basis.col(0).dot(inst.planted)), 1.0, 1e-12);
  const auto rot = gen_planted_sparse(400, 6, 0.1, 3, BasisMode::rotated);
  EXPECT_LT(std::abs(rot.basis.col(0).dot(rot.planted)), 1.0 - 1e-6);
}

TEST(PlantedSparse, ArgumentErrors) {
  EXPECT_THROW(gen_planted_sparse(10, 2, 0.05, 1), ArgumentError);  // floor(0.5) = 0
  EXPECT_THROW(gen_planted_sparse(10, 11, 0.5, 1), ArgumentError);
  EXPECT_EQ(planted_support_size(100, 0.07), 7u);  // 0.07*100 is 7.000000000000001
  EXPECT_EQ(planted_support_size(1000, 0.029), 29u);
}

TEST(Overcomplete, SingleComponentTensor) {
  const auto inst = gen_overcomplete(3, 1, 9);
  const Vector a = inst.components.col(0);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      for (Eigen::Index k = 0; k < 3; ++k) {
        std::array<Eigen::Index, 3> s{i, j, k};
        std::sort(s.begin(), s.end());  // entries are evaluated on sorted indices
        EXPECT_EQ(inst.tensor(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)),
                  a(s[0]) * (a(s[1]) * a(s[2])));
      }
}

TEST(Overcomplete, NormConcentration) {
  const auto inst = gen_overcomplete(50, 60, 4);
  const double mean = inst.components.colwise().squaredNorm().mean();
  EXPECT_GE(mean, 0.8);
  EXPECT_LE(mean, 1.2);
}

TEST(Overcomplete, DeterministicAndSymmetric) {
  const auto a = gen_overcomplete(6, 8, 21);
  const auto b = gen_overcomplete(6, 8, 21);
  EXPECT_EQ(a.components, b.components);
  EXPECT_EQ(a.tensor, b.tensor);
  const auto& t = a.tensor;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t k = 0; k < 6; ++k) {
        const double v = t(i, j, k);
        EXPECT_EQ(v, t(i, k, j));
        EXPECT_EQ(v, t(j, i, k));
        EXPECT_EQ(v, t(j, k, i));
        EXPECT_EQ(v, t(k, i, j));
        EXPECT_EQ(v, t(k, j, i));
      }
}

TEST(Spiked, PureNoiseNorm) {
  const std::size_t d = 30;
  const auto inst = gen_spiked(d, 0.0, 13);
  const double d3 = static_cast<double>(d * d * d);
  EXPECT_NEAR(inst.tensor.frobenius_norm_sq(), d3, 3.0 * std::sqrt(2.0 * d3));
  EXPECT_FALSE(inst.tensor.symmetric_hint());
}

TEST(Spiked, ConstructionIdentity) {
  const auto inst = gen_spiked(3, 10.0, 17);
  const Tensor3 noise = spiked_noise(3, 17);
  EXPECT_NEAR(inst.spike.norm(), 1.0, 1e-14);
  const Tensor3 expect = Tensor3::rank_one(inst.spike, 10.0);
  for (std::size_t i = 0; i < 27; ++i) EXPECT_NEAR(inst.tensor.entries()[i] - noise.entries()[i], expect.entries()[i], 1e-13);
}

TEST(Spiked, Deterministic) {
  EXPECT_EQ(gen_spiked(5, 2.0, 1).tensor, gen_spiked(5, 2.0, 1).tensor);
}

TEST(Orthonormalize, RejectsDependentColumns) {
  Matrix m(4, 2);
  m << 1, 2, 1, 2, 0, 0, 1, 2;
  EXPECT_THROW(orthonormalize_columns(m), NumericError);
}

TEST(Haar, IsOrthogonal) {
  RandomStream rng(1, 1);
  const Matrix q = haar_orthogonal(9, rng);
  EXPECT_LE((q.transpose() * q - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BasisMode, StringRoundTrip) {
  EXPECT_EQ(basis_mode_from_string(to_string(BasisMode::good)), BasisMode::good);
  EXPECT_EQ(basis_mode_from_string("rotated"), BasisMode::rotated);
  EXPECT_THROW(basis_mode_from_string("diagonal"), ArgumentError);
}
