#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l1compat/matrix_polynomial.hpp"

namespace l1c {

// Constant-coefficient differential operator from R^source to R^target on R^n,
// held through its symbol: entry (j, i) is sum_alpha (C_alpha)_{ji} xi^alpha.
// Each row must be homogeneous; rows may have different degrees.
//
// Convention: the DSL token d_j denotes the Fourier multiplier xi_j, i.e.
// D_j = -i partial_j. The symbol is therefore real and carries no powers of i;
// d1^2 + d2^2 is -Laplace with symbol |xi|^2.
class OperatorSpec {
 public:
  OperatorSpec() = default;
  OperatorSpec(MatrixPolynomial symbol, char component = 'f')
      : symbol_(std::move(symbol)), component_(component) {
    for (std::size_t r = 0; r < symbol_.rows(); ++r)
      if (!symbol_.row_is_homogeneous(r))
        throw Error(ErrorKind::NonHomogeneousRow, "row " + std::to_string(r + 1) + " mixes derivative orders");
  }

  static OperatorSpec zero(std::size_t n, std::size_t source, std::size_t target, char component = 'f') {
    return OperatorSpec(MatrixPolynomial(target, source, n), component);
  }

  static OperatorSpec from_coefficients(std::size_t n, std::size_t source, std::size_t target,
                                        const std::map<MultiIndex, RationalMatrix, MonomialOrder>& coeffs,
                                        char component = 'f') {
    MatrixPolynomial s(target, source, n);
    for (const auto& [alpha, c] : coeffs)
      for (std::size_t j = 0; j < target; ++j)
        for (std::size_t i = 0; i < source; ++i) s(j, i).add_term(alpha, c(j, i));
    return OperatorSpec(std::move(s), component);
  }

  std::size_t space_dim() const noexcept { return symbol_.nvars(); }
  std::size_t source_dim() const noexcept { return symbol_.cols(); }
  std::size_t target_dim() const noexcept { return symbol_.rows(); }
  char component() const noexcept { return component_; }
  void set_component(char c) noexcept { component_ = c; }

  const MatrixPolynomial& symbol() const noexcept { return symbol_; }

  std::optional<unsigned> row_degree(std::size_t r) const { return symbol_.row_degree(r); }

  // Highest row degree (0 for the zero operator).
  unsigned order() const {
    unsigned k = 0;
    for (std::size_t r = 0; r < target_dim(); ++r)
      if (auto d = row_degree(r)) k = std::max(k, *d);
    return k;
  }

  // All nonzero rows share one degree.
  bool is_homogeneous() const {
    std::optional<unsigned> k;
    for (std::size_t r = 0; r < target_dim(); ++r) {
      auto d = row_degree(r);
      if (!d) continue;
      if (k && *k != *d) return false;
      k = d;
    }
    return true;
  }

  // Coefficient matrix C_alpha (target x source) of xi^alpha.
  RationalMatrix coefficient(const MultiIndex& alpha) const {
    RationalMatrix c(target_dim(), source_dim());
    for (std::size_t j = 0; j < target_dim(); ++j)
      for (std::size_t i = 0; i < source_dim(); ++i) c(j, i) = symbol_(j, i).coefficient(alpha);
    return c;
  }

  std::map<MultiIndex, RationalMatrix, MonomialOrder> coefficients() const {
    std::map<MultiIndex, RationalMatrix, MonomialOrder> out;
    for (std::size_t j = 0; j < target_dim(); ++j)
      for (std::size_t i = 0; i < source_dim(); ++i)
        for (const auto& [alpha, c] : symbol_(j, i).terms()) {
          auto it = out.try_emplace(alpha, target_dim(), source_dim()).first;
          it->second(j, i) = c;
        }
    return out;
  }

  // Coefficient vectors of every row: for each row r and each monomial alpha
  // occurring in it, the vector (coefficient of xi^alpha in entry (r, i))_i.
  // A vector e satisfies C(xi) e == 0 for all xi iff it is orthogonal to all of them.
  std::vector<RationalVector> row_coefficient_vectors() const {
    std::vector<RationalVector> out;
    for (std::size_t r = 0; r < target_dim(); ++r) {
      std::map<MultiIndex, RationalVector, MonomialOrder> per;
      for (std::size_t i = 0; i < source_dim(); ++i)
        for (const auto& [alpha, c] : symbol_(r, i).terms()) {
          auto it = per.try_emplace(alpha, source_dim(), Rational(0)).first;
          it->second[i] = c;
        }
      for (auto& [alpha, v] : per) out.push_back(std::move(v));
    }
    return out;
  }

  friend OperatorSpec operator+(const OperatorSpec& a, const OperatorSpec& b) {
    return OperatorSpec(a.symbol_ + b.symbol_, a.component_);
  }

  // Structural equality ignores the component letter.
  bool operator==(const OperatorSpec& o) const { return symbol_ == o.symbol_; }

 private:
  MatrixPolynomial symbol_;
  char component_ = 'f';
};

// A u = f subject to C f = 0 on R^n. An absent C means no constraint.
struct SystemSpec {
  unsigned n = 0;
  std::string operator_name = "A";
  OperatorSpec A;
  std::string constraint_name;
  std::optional<OperatorSpec> C;
};

}  // namespace l1c
