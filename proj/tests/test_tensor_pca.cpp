#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectral/errors.hpp"
#include "spectral/instances.hpp"
#include "spectral/oracle.hpp"
#include "spectral/random.hpp"
#include "spectral/tensor_pca.hpp"

using namespace spectral;

namespace {

Tensor3 rotate(const Tensor3& t, const Matrix& q) {
  const std::size_t d = t.dim();
  Tensor3 a(d), b(d), c(d);
  auto idx = [](std::size_t x) { return static_cast<Eigen::Index>(x); };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        double s = 0;
        for (std::size_t p = 0; p < d; ++p) s += q(idx(i), idx(p)) * t(p, j, k);
        a(i, j, k) = s;
      }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        double s = 0;
        for (std::size_t p = 0; p < d; ++p) s += q(idx(j), idx(p)) * a(i, p, k);
        b(i, j, k) = s;
      }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        double s = 0;
        for (std::size_t p = 0; p < d; ++p) s += q(idx(k), idx(p)) * b(i, j, p);
        c(i, j, k) = s;
      }
  return c;
}

double median_abs_corr(std::size_t d, double tau, int seeds) {
  std::vector<double> c;
  for (int s = 1; s <= seeds; ++s) {
    const auto inst = gen_spiked(d, tau, static_cast<std::uint64_t>(s));
    c.push_back(*recover_spike(inst.tensor, {}, &inst.spike).correlation);
  }
  std::sort(c.begin(), c.end());
  return c[c.size() / 2];
}

}  // namespace

TEST(PartialTraceMatrix, ZeroNoiseIdentity) {
  RandomStream rng(1, 1);
  const Vector v = rng.normal_vector(7).normalized();
  const Matrix m = partial_trace_matrix(Tensor3::rank_one(v, 3.5));
  EXPECT_LE((m - 3.5 * 3.5 * v * v.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTraceMatrix, MatchesIndexSumOracle) {
  const auto inst = gen_spiked(3, 1.0, 4);
  const Matrix naive = oracle::naive_ptm(inst.tensor);
  const Matrix fast = partial_trace_matrix(inst.tensor);
  EXPECT_LE((fast - (naive + naive.transpose()) / 2.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTraceMatrix, SliceContribution) {
  const auto inst = gen_spiked(5, 0.0, 6);
  Tensor3 cut = inst.tensor;
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t k = 0; k < 5; ++k) cut(1, j, k) = 0.0;
  const Matrix slice = inst.tensor.slice(1);
  const Matrix term = slice.trace() * (slice + slice.transpose()) / 2.0;
  const Matrix diff = partial_trace_matrix(inst.tensor) - partial_trace_matrix(cut);
  EXPECT_LE((diff - term).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTraceMatrix, StreamMatchesInMemory) {
  const auto inst = gen_spiked(9, 2.0, 2);
  std::stringstream buf;
  write_slice_stream(buf, inst.tensor);
  EXPECT_EQ(partial_trace_matrix(buf), partial_trace_matrix(inst.tensor));
}

TEST(PartialTraceMatrix, TruncatedStreamRejected) {
  const auto inst = gen_spiked(4, 2.0, 2);
  std::stringstream buf;
  write_slice_stream(buf, inst.tensor);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 8);
  std::stringstream cut(bytes);
  EXPECT_THROW(partial_trace_matrix(cut), ArgumentError);
}

TEST(PartialTraceAccumulator, RequiresEverySlice) {
  PartialTraceAccumulator acc(3);
  const std::vector<double> slice(9, 1.0);
  acc.add_slice(slice);
  EXPECT_THROW(acc.finish(), ArgumentError);
  EXPECT_THROW(acc.add_slice(std::vector<double>(8, 0.0)), ArgumentError);
}

TEST(RecoverSpike, HugeSignal) {
  const auto inst = gen_spiked(20, 1e6, 3);
  const auto res = recover_spike(inst.tensor, {}, &inst.spike);
  EXPECT_GE(*res.correlation, 1.0 - 1e-4);
}

TEST(RecoverSpike, SignResolvedByCubicForm) {
  const auto inst = gen_spiked(15, 1e4, 8);
  const auto res = recover_spike(inst.tensor, {}, &inst.spike);
  EXPECT_GT(inst.tensor.multilinear(res.recovered, res.recovered, res.recovered), 0.0);
  EXPECT_GT(*res.correlation, 0.99);
}

TEST(RecoverSpike, RotationEquivariance) {
  const std::size_t d = 12;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = gen_spiked(d, tpca_tau(d, 4.0), seed);
    RandomStream rng(seed, 50);
    const Matrix q = haar_orthogonal(d, rng);
    PowerIterSettings s;
    s.rq_tolerance = 1e-14;
    const auto r1 = recover_spike(inst.tensor, s);
    const auto r2 = recover_spike(rotate(inst.tensor, q), s);
    if (r1.report.gap_ratio > 0.9) continue;
    ++checked;
    EXPECT_GE(std::abs(r2.recovered.dot(q * r1.recovered)), 1.0 - 1e-6) << "seed " << seed;
  }
  EXPECT_GT(checked, 0);
}

TEST(RecoverSpike, CorrelationGrowsWithTau) {
  const std::size_t d = 100;
  double prev = -1.0;
  for (double scale : {0.5, 1.0, 2.0, 4.0}) {
    const double med = median_abs_corr(d, tpca_tau(d, scale), 30);
    EXPECT_GE(med, prev) << "scale " << scale;
    prev = med;
  }
}

TEST(TpcaTau, Formula) {
  EXPECT_NEAR(tpca_tau(100, 4.0), 4.0 * std::pow(100.0, 0.75) * std::sqrt(std::log(100.0)), 1e-12);
}
