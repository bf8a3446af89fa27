#pragma once

#include <cassert>
#include <optional>
#include <span>
#include <vector>

#include "l1compat/matrix.hpp"
#include "l1compat/polynomial.hpp"

namespace l1c {

// Matrix whose entries are polynomials in a common set of n variables.
class MatrixPolynomial {
 public:
  MatrixPolynomial() = default;
  MatrixPolynomial(std::size_t rows, std::size_t cols, std::size_t nvars)
      : rows_(rows), cols_(cols), nvars_(nvars), entries_(rows * cols, Polynomial(nvars)) {}

  static MatrixPolynomial identity(std::size_t n, std::size_t nvars, const Polynomial& diag) {
    MatrixPolynomial m(n, n, nvars);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = diag;
    return m;
  }

  static MatrixPolynomial constant(const RationalMatrix& c, std::size_t nvars) {
    MatrixPolynomial m(c.rows(), c.cols(), nvars);
    for (std::size_t i = 0; i < c.rows(); ++i)
      for (std::size_t j = 0; j < c.cols(); ++j) m(i, j) = Polynomial::constant(nvars, c(i, j));
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nvars() const noexcept { return nvars_; }

  Polynomial& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Polynomial& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& p : entries_)
      if (!p.is_zero()) return false;
    return true;
  }

  bool row_is_zero(std::size_t i) const {
    for (std::size_t j = 0; j < cols_; ++j)
      if (!(*this)(i, j).is_zero()) return false;
    return true;
  }

  // Maximal total degree in row i; nullopt for a zero row.
  std::optional<unsigned> row_degree(std::size_t i) const {
    std::optional<unsigned> d;
    for (std::size_t j = 0; j < cols_; ++j) {
      auto dj = (*this)(i, j).total_degree();
      if (dj && (!d || *dj > *d)) d = dj;
    }
    return d;
  }

  // Whether every term in row i has the same degree.
  bool row_is_homogeneous(std::size_t i) const {
    auto d = row_degree(i);
    if (!d) return true;
    for (std::size_t j = 0; j < cols_; ++j)
      for (const auto& [a, c] : (*this)(i, j).terms())
        if (a.degree() != *d) return false;
    return true;
  }

  MatrixPolynomial transpose() const {
    MatrixPolynomial t(cols_, rows_, nvars_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend MatrixPolynomial operator*(const MatrixPolynomial& a, const MatrixPolynomial& b) {
    assert(a.cols_ == b.rows_);
    MatrixPolynomial r(a.rows_, b.cols_, a.nvars_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Polynomial& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial& b) {
    for (std::size_t i = 0; i < a.entries_.size(); ++i) a.entries_[i] += b.entries_[i];
    return a;
  }
  friend MatrixPolynomial operator-(MatrixPolynomial a, const MatrixPolynomial& b) {
    for (std::size_t i = 0; i < a.entries_.size(); ++i) a.entries_[i] -= b.entries_[i];
    return a;
  }
  friend MatrixPolynomial operator*(const Polynomial& s, const MatrixPolynomial& m) {
    MatrixPolynomial r(m.rows_, m.cols_, m.nvars_);
    for (std::size_t i = 0; i < m.entries_.size(); ++i) r.entries_[i] = s * m.entries_[i];
    return r;
  }
  friend MatrixPolynomial operator*(const Rational& s, MatrixPolynomial m) {
    for (auto& p : m.entries_) p *= s;
    return m;
  }

  RationalMatrix eval(std::span<const Rational> xi) const {
    RationalMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).eval(xi);
    return r;
  }

  Matrix<double> eval(std::span<const double> xi) const {
    Matrix<double> r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).eval(xi);
    return r;
  }

  // Entrywise d^beta.
  MatrixPolynomial derivative(const MultiIndex& beta) const {
    MatrixPolynomial r(rows_, cols_, nvars_);
    for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = entries_[i].derivative(beta);
    return r;
  }

  bool operator==(const MatrixPolynomial& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && nvars_ == o.nvars_ && entries_ == o.entries_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0, nvars_ = 0;
  std::vector<Polynomial> entries_;
};

// Flattened double-precision copy of a MatrixPolynomial for hot evaluation
// loops. Powers are built by repeated multiplication and terms are summed in a
// fixed order, so evaluating at -xi yields exactly (-1)^deg times the value at xi
// for homogeneous entries.
class NumericMatrixPolynomial {
 public:
  NumericMatrixPolynomial() = default;
  explicit NumericMatrixPolynomial(const MatrixPolynomial& m)
      : rows_(m.rows()), cols_(m.cols()), nvars_(m.nvars()) {
    offsets_.push_back(0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        for (const auto& [a, c] : m(i, j).terms()) {
          coeffs_.push_back(c.get_d());
          for (std::size_t v = 0; v < nvars_; ++v) {
            exps_.push_back(a[v]);
            max_exp_ = std::max(max_exp_, a[v]);
          }
        }
        offsets_.push_back(coeffs_.size());
      }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  // Writes row-major values into out (size rows*cols).
  void eval(std::span<const double> xi, std::span<double> out) const {
    thread_local std::vector<double> pw;
    const std::size_t stride = max_exp_ + 1;
    pw.assign(nvars_ * stride, 1.0);
    for (std::size_t v = 0; v < nvars_; ++v)
      for (unsigned e = 1; e <= max_exp_; ++e) pw[v * stride + e] = pw[v * stride + e - 1] * xi[v];
    for (std::size_t k = 0; k + 1 < offsets_.size(); ++k) {
      double s = 0;
      for (std::size_t t = offsets_[k]; t < offsets_[k + 1]; ++t) {
        double term = coeffs_[t];
        for (std::size_t v = 0; v < nvars_; ++v) {
          const unsigned e = exps_[t * nvars_ + v];
          if (e) term *= pw[v * stride + e];
        }
        s += term;
      }
      out[k] = s;
    }
  }

 private:
  std::size_t rows_ = 0, cols_ = 0, nvars_ = 0;
  unsigned max_exp_ = 0;
  std::vector<double> coeffs_;
  std::vector<unsigned> exps_;
  std::vector<std::size_t> offsets_;
};

}  // namespace l1c
