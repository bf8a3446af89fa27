#pragma once

#include <string>
#include <vector>

#include "l1compat/matrix.hpp"

namespace l1c {

// Linear subspace of Q^d held in canonical form: the basis is the set of
// nonzero rows of a reduced row echelon matrix, so equal subspaces compare
// equal structurally.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::size_t ambient) : ambient_(ambient), basis_(0, ambient) {}

  static Subspace zero(std::size_t ambient) { return Subspace(ambient); }
  static Subspace full(std::size_t ambient) { return span(ambient, identity_rows(ambient)); }

  static Subspace span(std::size_t ambient, const std::vector<RationalVector>& vectors) {
    Subspace s(ambient);
    if (vectors.empty()) return s;
    s.basis_ = rref(RationalMatrix::from_rows(ambient, vectors)).reduced;
    return s;
  }

  // {x : m x = 0}
  static Subspace kernel_of(const RationalMatrix& m) { return span(m.cols(), nullspace(m)); }

  std::size_t ambient_dim() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.rows(); }
  bool is_zero() const noexcept { return basis_.rows() == 0; }
  bool is_full() const noexcept { return basis_.rows() == ambient_; }

  std::vector<RationalVector> basis() const {
    std::vector<RationalVector> out;
    for (std::size_t i = 0; i < basis_.rows(); ++i) out.push_back(basis_.row(i));
    return out;
  }
  const RationalMatrix& basis_matrix() const noexcept { return basis_; }

  bool contains(const RationalVector& v) const {
    if (is_zero()) return l1c::is_zero(v);
    std::vector<RationalVector> rows = basis();
    rows.push_back(v);
    return rank(RationalMatrix::from_rows(ambient_, rows)) == dim();
  }

  bool contains(const Subspace& o) const {
    for (const auto& v : o.basis())
      if (!contains(v)) return false;
    return true;
  }

  Subspace orthogonal_complement() const {
    if (is_zero()) return full(ambient_);
    return kernel_of(basis_);
  }

  // Intersection as the kernel of the stacked complement systems.
  Subspace intersect(const Subspace& o) const {
    const auto a = orthogonal_complement().basis();
    const auto b = o.orthogonal_complement().basis();
    std::vector<RationalVector> rows(a);
    rows.insert(rows.end(), b.begin(), b.end());
    if (rows.empty()) return full(ambient_);
    return kernel_of(RationalMatrix::from_rows(ambient_, rows));
  }

  // Image of the subspace under a linear map.
  Subspace mapped(const RationalMatrix& m) const {
    std::vector<RationalVector> imgs;
    for (const auto& v : basis()) imgs.push_back(m * v);
    return span(m.rows(), imgs);
  }

  bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }

 private:
  static std::vector<RationalVector> identity_rows(std::size_t d) {
    std::vector<RationalVector> rows;
    for (std::size_t i = 0; i < d; ++i) rows.push_back(unit_vector(d, i));
    return rows;
  }

  std::size_t ambient_ = 0;
  RationalMatrix basis_;
};

inline std::string to_string(const Subspace& s) {
  if (s.is_zero()) return "{0}";
  std::string out = "span{";
  const auto b = s.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ", ";
    out += to_string(b[i]);
  }
  return out + "}";
}

}  // namespace l1c
