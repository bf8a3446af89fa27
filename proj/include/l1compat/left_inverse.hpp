#pragma once

#include <map>

#include "l1compat/conditions.hpp"

namespace l1c {

// Maps K_beta : F -> im M* (|beta| = l) with sum_beta K_beta L_beta = Pi, the
// orthogonal projector of E onto im M*; in particular the sum is the identity
// on im M*. F is the target of the homogenized operator.
struct LeftInverseFamily {
  OperatorSpec op;  // homogenized L, order l
  Subspace target;  // im M*
  RationalMatrix projector;
  std::map<MultiIndex, RationalMatrix, MonomialOrder> maps;  // dim E x dim F each

  std::size_t space_dim() const { return op.space_dim(); }
  std::size_t dim_e() const { return op.source_dim(); }
  std::size_t dim_f() const { return op.target_dim(); }
};

namespace left_inverse_detail {

// Orthogonal projector onto the span of the rows of b (rows independent).
inline RationalMatrix row_space_projector(const RationalMatrix& b, std::size_t dim) {
  if (b.rows() == 0) return RationalMatrix(dim, dim);
  const RationalMatrix bt = b.transpose();
  return bt * (*inverse(b * bt)) * b;
}

}  // namespace left_inverse_detail

// Builds the family for the stacked map T : e -> (L_beta e)_beta. With Q a
// basis of the row space of T and R = Pi Q (Q^T T^T T Q)^{-1} Q^T, the column
// of K_beta for row r of L is R c, where c is that row of L_beta. Then
// sum_beta K_beta L_beta = Pi P, P the projector onto the row space, and
// Pi P = Pi exactly when M kills the kernel intersection.
inline LeftInverseFamily left_inverse_family(const OperatorSpec& l, const RationalMatrix& m) {
  if (m.cols() != l.source_dim())
    throw Error(ErrorKind::DimensionMismatch, "M must act on the source space of L (" + std::to_string(l.source_dim()) +
                                                  " columns, got " + std::to_string(m.cols()) + ")");
  LeftInverseFamily fam;
  fam.op = homogenize(l);
  const std::size_t e = fam.dim_e(), f = fam.dim_f();
  const Subspace kernel = coefficient_kernel(fam.op);
  for (const auto& v : kernel.basis())
    if (!is_zero(m * v))
      throw Error(ErrorKind::HypothesisFailed, "M does not vanish on the kernel intersection of L (vector " + to_string(v) + ")");

  fam.target = Subspace::span(e, [&] {
    std::vector<RationalVector> rows;
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    return rows;
  }());
  fam.projector = left_inverse_detail::row_space_projector(fam.target.basis_matrix(), e);

  const auto coeffs = fam.op.coefficients();
  RationalMatrix gram(e, e);
  for (const auto& [beta, c] : coeffs) gram = gram + c.transpose() * c;
  const RationalMatrix q = kernel.orthogonal_complement().basis_matrix().transpose();  // e x r
  RationalMatrix r(e, e);
  if (q.cols() > 0) {
    const RationalMatrix qt = q.transpose();
    r = fam.projector * q * (*inverse(qt * gram * q)) * qt;
  }
  for (const auto& [beta, c] : coeffs) fam.maps.emplace(beta, r * c.transpose());
  // multi-indices of order l absent from L get zero maps
  for (const auto& beta : multi_indices_of_degree(fam.space_dim(), fam.op.order()))
    fam.maps.try_emplace(beta, RationalMatrix(e, f));
  return fam;
}

// sum_beta K_beta L_beta as a matrix on E.
inline RationalMatrix family_sum(const LeftInverseFamily& fam) {
  RationalMatrix s(fam.dim_e(), fam.dim_e());
  for (const auto& [beta, k] : fam.maps) s = s + k * fam.op.coefficient(beta);
  return s;
}

// Exact check of sum_beta K_beta L_beta |_{im M*} = Id_{im M*}.
inline bool verify_left_inverse(const LeftInverseFamily& fam) {
  const RationalMatrix s = family_sum(fam);
  for (const auto& v : fam.target.basis())
    if (s * v != v) return false;
  for (std::size_t j = 0; j < fam.dim_f(); ++j)
    for (const auto& [beta, k] : fam.maps)
      if (!fam.target.contains(k.column(j))) return false;
  return true;
}

// P(x) = sum_beta x^beta / beta! K_beta^*, a dim F x dim E polynomial field.
inline MatrixPolynomial potential_field(const LeftInverseFamily& fam) {
  const std::size_t n = fam.space_dim();
  MatrixPolynomial p(fam.dim_f(), fam.dim_e(), n);
  for (const auto& [beta, k] : fam.maps) {
    const Rational scale = 1 / beta.factorial();
    for (std::size_t i = 0; i < fam.dim_f(); ++i)
      for (std::size_t j = 0; j < fam.dim_e(); ++j)
        if (k(j, i) != 0) p(i, j) = p(i, j) + Polynomial::monomial(beta, scale * k(j, i));
  }
  return p;
}

// L^* P = sum_beta L_beta^T d^beta P, applied column by column.
inline MatrixPolynomial apply_adjoint(const OperatorSpec& l, const MatrixPolynomial& p) {
  MatrixPolynomial out(l.source_dim(), p.cols(), l.space_dim());
  for (const auto& [beta, c] : l.coefficients())
    out = out + MatrixPolynomial::constant(c.transpose(), l.space_dim()) * p.derivative(beta);
  return out;
}

// Exact check of L^* P = Id on im M*: L^* P is constant and acts as the
// identity on every basis vector of im M*.
inline bool verify_potential(const LeftInverseFamily& fam, const MatrixPolynomial& p) {
  const MatrixPolynomial lp = apply_adjoint(fam.op, p);
  const std::vector<Rational> origin(fam.space_dim(), Rational(0));
  const RationalMatrix value = lp.eval(std::span<const Rational>(origin));
  if (!(lp == MatrixPolynomial::constant(value, fam.space_dim()))) return false;
  for (const auto& v : fam.target.basis())
    if (value * v != v) return false;
  return true;
}

}  // namespace l1c
