#include "spectral/tensor_pca.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "spectral/errors.hpp"

namespace spectral {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename T>
T from_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

}  // namespace

PartialTraceAccumulator::PartialTraceAccumulator(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ArgumentError("PartialTraceAccumulator: dimension must be positive");
  const auto d = static_cast<Eigen::Index>(dim);
  sum_ = RowMatrix::Zero(d, d);
}

void PartialTraceAccumulator::add_slice(std::span<const double> slice) {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (slice.size() != dim_ * dim_)
    throw ArgumentError("PartialTraceAccumulator: slice has " + std::to_string(slice.size()) + " entries, expected " +
                        std::to_string(dim_ * dim_));
  if (seen_ >= dim_) throw ArgumentError("PartialTraceAccumulator: more than d slices supplied");
  ConstRowMap s(slice.data(), d, d);
  sum_ += s.trace() * s;
  ++seen_;
}

Matrix PartialTraceAccumulator::finish() const {
  if (seen_ != dim_)
    throw ArgumentError("PartialTraceAccumulator: saw " + std::to_string(seen_) + " of " + std::to_string(dim_) +
                        " slices");
  return Matrix(0.5 * (sum_ + sum_.transpose()));
}

Matrix partial_trace_matrix(const Tensor3& t) {
  const std::size_t d = t.dim();
  if (d == 0) throw ArgumentError("partial_trace_matrix: empty tensor");
  PartialTraceAccumulator acc(d);
  const auto entries = t.entries();
  for (std::size_t i = 0; i < d; ++i) acc.add_slice(entries.subspan(i * d * d, d * d));
  return acc.finish();
}

Matrix partial_trace_matrix(std::istream& in) {
  std::uint64_t d = 0;
  if (!in.read(reinterpret_cast<char*>(&d), sizeof d)) throw ArgumentError("slice stream: missing header");
  d = from_little_endian(d);
  if (d == 0 || d > (1u << 16)) throw ArgumentError("slice stream: implausible dimension " + std::to_string(d));
  PartialTraceAccumulator acc(static_cast<std::size_t>(d));
  std::vector<double> slice(static_cast<std::size_t>(d * d));
  for (std::uint64_t i = 0; i < d; ++i) {
    if (!in.read(reinterpret_cast<char*>(slice.data()), static_cast<std::streamsize>(slice.size() * sizeof(double))))
      throw ArgumentError("slice stream: truncated at slice " + std::to_string(i));
    for (double& x : slice) x = from_little_endian(x);
    acc.add_slice(slice);
  }
  return acc.finish();
}

void write_slice_stream(std::ostream& out, const Tensor3& t) {
  const std::uint64_t d = from_little_endian(static_cast<std::uint64_t>(t.dim()));
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  for (double x : t.entries()) {
    const double le = from_little_endian(x);
    out.write(reinterpret_cast<const char*>(&le), sizeof le);
  }
}

TpcaResult recover_spike(const Tensor3& t, const PowerIterSettings& settings, const Vector* spike) {
  if (spike && spike->size() != static_cast<Eigen::Index>(t.dim()))
    throw ArgumentError("recover_spike: spike has wrong length");
  TpcaResult result;
  auto start = Clock::now();
  const Matrix m = partial_trace_matrix(t);
  result.build_ms = ms_since(start);

  start = Clock::now();
  result.report = power_iteration([&m](const Vector& x) -> Vector { return m * x; }, t.dim(), settings);
  result.recovered = result.report.eigvec;
  // T(−u,−u,−u) = −T(u,u,u): keep the sign with nonnegative cubic form.
  if (t.multilinear(result.recovered, result.recovered, result.recovered) < 0.0) result.recovered = -result.recovered;
  result.iterate_ms = ms_since(start);

  if (spike) result.correlation = spike->dot(result.recovered);
  return result;
}

double tpca_tau(std::size_t d, double scale) {
  const double dd = static_cast<double>(d);
  return scale * std::pow(dd, 0.75) * std::sqrt(std::log(dd));
}

}  // namespace spectral
