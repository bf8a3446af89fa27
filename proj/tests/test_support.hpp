#pragma once

#include <random>
#include <vector>

#include "l1compat/matrix.hpp"
#include "l1compat/operator.hpp"

namespace l1c::gen {

inline Rational random_rational(std::mt19937_64& rng, int range = 5, int den = 3) {
  std::uniform_int_distribution<int> num(-range, range), d(1, den);
  Rational q(num(rng), d(rng));
  q.canonicalize();
  return q;
}

inline RationalVector random_nonzero_vector(std::mt19937_64& rng, std::size_t n, int range = 6) {
  std::uniform_int_distribution<int> dist(-range, range);
  RationalVector v(n);
  do {
    for (auto& x : v) x = dist(rng);
  } while (is_zero(v));
  return v;
}

inline RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  RationalMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_rational(rng);
  return m;
}

// Random operator with the given row degrees; each entry gets a few random
// monomials of its row degree, some entries are left empty.
inline OperatorSpec random_operator(std::mt19937_64& rng, std::size_t n, std::size_t source,
                                    const std::vector<unsigned>& row_degrees, double density = 0.6, char letter = 'f') {
  std::uniform_real_distribution<double> u(0, 1);
  MatrixPolynomial s(row_degrees.size(), source, n);
  for (std::size_t r = 0; r < row_degrees.size(); ++r) {
    const auto monos = multi_indices_of_degree(n, row_degrees[r]);
    std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
    for (std::size_t i = 0; i < source; ++i) {
      if (u(rng) > density) continue;
      Polynomial p(n);
      for (int t = 0; t < 2; ++t) p.add_term(monos[pick(rng)], random_rational(rng));
      s(r, i) = p;
    }
  }
  return OperatorSpec(std::move(s), letter);
}

// Positive definite quadratic form xi^T (B^T B + I) xi with random B.
inline Polynomial random_positive_form(std::mt19937_64& rng, std::size_t n) {
  const RationalMatrix b = random_matrix(rng, n, n);
  const RationalMatrix q = b.transpose() * b + RationalMatrix::identity(n);
  Polynomial p(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      MultiIndex a(n);
      a[i] += 1;
      a[j] += 1;
      p.add_term(a, q(i, j));
    }
  return p;
}

// Elliptic operator of order k from R^v to R^e (e >= v + 1 when k is odd):
// each source component gets an elliptic block, which is then mixed by
// random invertible constant matrices and padded with random rows.
inline OperatorSpec random_elliptic(std::mt19937_64& rng, std::size_t n, unsigned k, std::size_t v, std::size_t extra_rows = 1) {
  std::vector<std::vector<Polynomial>> rows;
  for (std::size_t c = 0; c < v; ++c) {
    if (k % 2 == 0) {
      std::vector<Polynomial> row(v, Polynomial(n));
      row[c] = random_positive_form(rng, n).pow(k / 2);
      rows.push_back(row);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Polynomial> row(v, Polynomial(n));
        row[c] = Polynomial::variable(n, i) * random_positive_form(rng, n).pow((k - 1) / 2);
        rows.push_back(row);
      }
    }
  }
  const auto pad = random_operator(rng, n, v, std::vector<unsigned>(extra_rows, k), 0.7);
  for (std::size_t r = 0; r < extra_rows; ++r) {
    std::vector<Polynomial> row;
    for (std::size_t c = 0; c < v; ++c) row.push_back(pad.symbol()(r, c));
    rows.push_back(row);
  }
  MatrixPolynomial s(rows.size(), v, n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < v; ++c) s(r, c) = rows[r][c];
  RationalMatrix left, right;
  do left = random_matrix(rng, rows.size(), rows.size());
  while (determinant(left) == 0);
  do right = random_matrix(rng, v, v);
  while (determinant(right) == 0);
  return OperatorSpec(MatrixPolynomial::constant(left, n) * s * MatrixPolynomial::constant(right, n), 'u');
}

}  // namespace l1c::gen
