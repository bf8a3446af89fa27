#pragma once

#include <optional>
#include <vector>

#include "l1compat/subspace.hpp"
#include "l1compat/symbol.hpp"

namespace l1c {

// Brings every row to the common degree l = max_j d_j: a row of degree d_j < l
// is replaced, in place, by the rows C_j(xi) xi^gamma for all |gamma| = l - d_j
// in monomial order. Zero rows and rows already of degree l are kept as they
// are, so homogeneous input is returned unchanged. The kernel intersection over
// xi != 0 is preserved because some xi^gamma is nonzero whenever xi is.
inline OperatorSpec homogenize(const OperatorSpec& c) {
  const std::size_t n = c.space_dim();
  const unsigned l = c.order();
  std::vector<std::vector<Polynomial>> rows;
  for (std::size_t r = 0; r < c.target_dim(); ++r) {
    std::vector<Polynomial> row;
    for (std::size_t i = 0; i < c.source_dim(); ++i) row.push_back(c.symbol()(r, i));
    const auto d = c.row_degree(r);
    if (!d || *d == l) {
      rows.push_back(std::move(row));
      continue;
    }
    for (const auto& gamma : multi_indices_of_degree(n, l - *d)) {
      std::vector<Polynomial> padded;
      for (const auto& p : row) padded.push_back(p.shifted(gamma));
      rows.push_back(std::move(padded));
    }
  }
  MatrixPolynomial s(rows.size(), c.source_dim(), n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t i = 0; i < c.source_dim(); ++i) s(r, i) = std::move(rows[r][i]);
  return OperatorSpec(std::move(s), c.component());
}

// Common kernel of the coefficient matrices of a homogeneous operator.
inline Subspace coefficient_kernel(const OperatorSpec& op) {
  auto vecs = op.row_coefficient_vectors();
  if (vecs.empty()) return Subspace::full(op.source_dim());
  return Subspace::kernel_of(RationalMatrix::from_rows(op.source_dim(), vecs));
}

// K_C = intersection of ker C(xi) over xi != 0, computed exactly from the
// coefficients of the homogenized operator.
inline Subspace kernel_intersection(const OperatorSpec& c) { return coefficient_kernel(homogenize(c)); }

// I_A = intersection of im A(xi) over xi != 0 as the coefficient kernel of the
// exact annihilator. Propagates NotElliptic.
inline Subspace image_intersection(const OperatorSpec& a) { return coefficient_kernel(annihilator(a)); }

struct CompatibilityResult {
  Subspace image_intersection;   // I_A
  Subspace kernel_intersection;  // K_C (all of E when unconstrained)
  Subspace common;               // I_A cap K_C
  bool holds = false;
  std::optional<RationalVector> witness;  // first canonical basis vector of `common`
};

// Condition (CC): I_A cap K_C = {0}.
inline CompatibilityResult check_CC(const SystemSpec& sys) {
  CompatibilityResult r;
  r.image_intersection = image_intersection(sys.A);
  r.kernel_intersection = sys.C ? kernel_intersection(*sys.C) : Subspace::full(sys.A.target_dim());
  r.common = r.image_intersection.intersect(r.kernel_intersection);
  r.holds = r.common.is_zero();
  if (!r.holds) r.witness = r.common.basis().front();
  return r;
}

}  // namespace l1c
