#include "spectral/tensor3.hpp"

#include <string>

#include "spectral/errors.hpp"

namespace spectral {

namespace {

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

Tensor3::Tensor3(std::size_t dim, bool symmetric_hint)
    : dim_(dim), entries_(dim * dim * dim, 0.0), symmetric_hint_(symmetric_hint) {
  if (dim == 0) throw ArgumentError("Tensor3: dimension must be positive");
}

Tensor3::Tensor3(std::size_t dim, std::vector<double> entries, bool symmetric_hint)
    : dim_(dim), entries_(std::move(entries)), symmetric_hint_(symmetric_hint) {
  if (dim == 0) throw ArgumentError("Tensor3: dimension must be positive");
  if (entries_.size() != dim * dim * dim)
    throw ArgumentError("Tensor3: expected " + std::to_string(dim * dim * dim) + " entries, got " +
                        std::to_string(entries_.size()));
}

ConstRowMap Tensor3::slice(std::size_t i) const {
  if (i >= dim_) throw ArgumentError("Tensor3::slice: index out of range");
  return ConstRowMap(entries_.data() + i * dim_ * dim_, as_index(dim_), as_index(dim_));
}

ConstRowMap Tensor3::mode1_view() const {
  return ConstRowMap(entries_.data(), as_index(dim_), as_index(dim_ * dim_));
}

ConstRowMap Tensor3::pairs_by_last_view() const {
  return ConstRowMap(entries_.data(), as_index(dim_ * dim_), as_index(dim_));
}

Vector Tensor3::contract_last_two(const Vector& y, const Vector& z) const {
  if (y.size() != as_index(dim_) || z.size() != as_index(dim_))
    throw ArgumentError("Tensor3::contract_last_two: dimension mismatch");
  // (d² × d) · z gives Σ_k t(i,j,k) z_k per pair (i,j); then contract j with y.
  const Vector tz = pairs_by_last_view() * z;
  return ConstRowMap(tz.data(), as_index(dim_), as_index(dim_)) * y;
}

double Tensor3::multilinear(const Vector& x, const Vector& y, const Vector& z) const {
  if (x.size() != as_index(dim_)) throw ArgumentError("Tensor3::multilinear: dimension mismatch");
  return x.dot(contract_last_two(y, z));
}

double Tensor3::frobenius_norm_sq() const noexcept {
  double s = 0.0;
  for (double e : entries_) s += e * e;
  return s;
}

Tensor3 Tensor3::from_components(const Matrix& components) {
  const auto d = static_cast<std::size_t>(components.rows());
  Tensor3 t(d, true);
  RowMap flat(t.entries_.data(), as_index(d), as_index(d * d));
  // Mode-1 flattening Σ_l a_l (a_l ⊗ a_l)ᵀ.
  RowMatrix pairs(components.cols(), as_index(d * d));
  for (Eigen::Index l = 0; l < components.cols(); ++l) {
    const Vector a = components.col(l);
    pairs.row(l) = kron(a, a).transpose();
  }
  flat.noalias() = components * pairs;
  t.copy_canonical_to_permutations();
  return t;
}

Tensor3 Tensor3::rank_one(const Vector& v, double tau) {
  const auto d = static_cast<std::size_t>(v.size());
  Tensor3 t(d, true);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      for (std::size_t k = j; k < d; ++k) t(i, j, k) = tau * (v(as_index(i)) * (v(as_index(j)) * v(as_index(k))));
  t.copy_canonical_to_permutations();
  return t;
}

void Tensor3::copy_canonical_to_permutations() noexcept {
  // Entry (i, j, k) with i ≤ j ≤ k is authoritative; rounding in the assembly would
  // otherwise leave the six copies differing in the last bit.
  Tensor3& t = *this;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      for (std::size_t k = j; k < dim_; ++k) {
        const double e = t(i, j, k);
        t(i, k, j) = e;
        t(j, i, k) = e;
        t(j, k, i) = e;
        t(k, i, j) = e;
        t(k, j, i) = e;
      }
}

Matrix flatten3(const Tensor3& t, int mode) {
  if (mode < 1 || mode > 3) throw ArgumentError("flatten3: mode must be 1, 2 or 3, got " + std::to_string(mode));
  const std::size_t d = t.dim();
  Matrix out(as_index(d), as_index(d * d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const double e = t(i, j, k);
        switch (mode) {
          case 1: out(as_index(i), as_index(j * d + k)) = e; break;
          case 2: out(as_index(j), as_index(i * d + k)) = e; break;
          default: out(as_index(k), as_index(i * d + j)) = e; break;
        }
      }
  return out;
}

Matrix reshape_vec_to_matrix(const Vector& v, std::size_t d) {
  if (static_cast<std::size_t>(v.size()) != d * d)
    throw ArgumentError("reshape_vec_to_matrix: length " + std::to_string(v.size()) + " is not " +
                        std::to_string(d) + "^2");
  return ConstRowMap(v.data(), as_index(d), as_index(d));
}

Vector flatten_matrix(const Matrix& m) {
  Vector out(m.size());
  RowMap(out.data(), m.rows(), m.cols()) = m;
  return out;
}

}  // namespace spectral
