#pragma once

#include <bit>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "l1compat/operator.hpp"

namespace l1c {

inline const MatrixPolynomial& symbol(const OperatorSpec& op) { return op.symbol(); }

inline RationalMatrix eval(const MatrixPolynomial& m, std::span<const Rational> xi) { return m.eval(xi); }

// G(xi) = A*(xi) A(xi), dim V x dim V.
inline MatrixPolynomial gram(const OperatorSpec& a) {
  return a.symbol().transpose() * a.symbol();
}

namespace symbol_detail {

// Laplace expansion along successive rows, memoised on the set of columns
// still available (the row is implied by how many columns were used).
inline Polynomial cofactor_determinant(const MatrixPolynomial& g) {
  const std::size_t m = g.rows();
  const std::size_t nv = g.nvars();
  if (m == 0) return Polynomial::constant(nv, 1);
  std::unordered_map<std::uint32_t, Polynomial> memo;
  auto rec = [&](auto&& self, std::uint32_t mask) -> Polynomial {
    if (mask == 0) return Polynomial::constant(nv, 1);
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    const std::size_t row = m - static_cast<std::size_t>(std::popcount(mask));
    Polynomial acc(nv);
    int position = 0;
    for (std::size_t c = 0; c < m; ++c) {
      if (!(mask & (1u << c))) continue;
      const Polynomial& entry = g(row, c);
      if (!entry.is_zero()) {
        Polynomial term = entry * self(self, mask & ~(1u << c));
        if (position % 2) acc -= term;
        else acc += term;
      }
      ++position;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return rec(rec, (m == 32 ? 0xffffffffu : ((1u << m) - 1)));
}

inline MatrixPolynomial minor_matrix(const MatrixPolynomial& g, std::size_t skip_row, std::size_t skip_col) {
  MatrixPolynomial r(g.rows() - 1, g.cols() - 1, g.nvars());
  for (std::size_t i = 0, ri = 0; i < g.rows(); ++i) {
    if (i == skip_row) continue;
    for (std::size_t j = 0, rj = 0; j < g.cols(); ++j) {
      if (j == skip_col) continue;
      r(ri, rj++) = g(i, j);
    }
    ++ri;
  }
  return r;
}

}  // namespace symbol_detail

struct DetAdj {
  Polynomial det;
  MatrixPolynomial adj;
};

// det G and adj G by cofactor expansion; G adj G = det G Id holds exactly.
inline DetAdj det_adj(const MatrixPolynomial& g) {
  if (g.rows() != g.cols()) throw Error(ErrorKind::InvalidArgument, "det_adj needs a square matrix");
  if (g.rows() > 31) throw Error(ErrorKind::InvalidArgument, "det_adj limited to 31x31");
  const std::size_t m = g.rows();
  DetAdj out{symbol_detail::cofactor_determinant(g), MatrixPolynomial(m, m, g.nvars())};
  if (m == 1) {
    out.adj(0, 0) = Polynomial::constant(g.nvars(), 1);
    return out;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Polynomial c = symbol_detail::cofactor_determinant(symbol_detail::minor_matrix(g, j, i));
      out.adj(i, j) = (i + j) % 2 ? -c : c;
    }
  return out;
}

// Nonzero rational probe points used to detect degenerate symbols: the
// coordinate axes, the diagonal, and a fixed pseudo-random integer set.
inline std::vector<RationalVector> probe_points(std::size_t n, std::size_t random_count = 16) {
  std::vector<RationalVector> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(unit_vector(n, i));
  pts.emplace_back(n, Rational(1));
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (std::size_t k = 0; k < random_count; ++k) {
    RationalVector p(n);
    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      const long v = static_cast<long>((state >> 33) % 11) - 5;
      p[i] = v;
      nonzero |= v != 0;
    }
    if (!nonzero) p[0] = 1;
    pts.push_back(std::move(p));
  }
  return pts;
}

// Polynomial data of the pseudo-inverse A^dagger = (A*A)^{-1} A* = numerator / det.
struct PseudoInverseData {
  Polynomial det;              // det G
  MatrixPolynomial numerator;  // adj G * A*, dim V x dim E
};

inline PseudoInverseData pseudo_inverse_data(const OperatorSpec& a) {
  auto [det, adj] = det_adj(gram(a));
  return {std::move(det), adj * a.symbol().transpose()};
}

// Exact annihilator L(xi) = det G(xi) Id_E - A(xi) adj G(xi) A*(xi).
//
// L(xi) A(xi) = 0 identically, and ker L(xi) = im A(xi) wherever det G(xi) != 0.
// Every nonzero entry is homogeneous of degree 2 k dim V when A has order k.
// Throws NotElliptic when det G vanishes identically or at a probe point.
inline OperatorSpec annihilator(const OperatorSpec& a) {
  const std::size_t n = a.space_dim(), e = a.target_dim();
  auto [det, adj] = det_adj(gram(a));
  if (det.is_zero()) throw Error(ErrorKind::NotElliptic, "det A*A vanishes identically");
  for (const auto& xi : probe_points(n))
    if (det.eval(xi) == 0) throw Error(ErrorKind::NotElliptic, "det A*A vanishes at xi = " + to_string(xi));
  const MatrixPolynomial& s = a.symbol();
  MatrixPolynomial l = MatrixPolynomial::identity(e, n, det) - s * adj * s.transpose();
  return OperatorSpec(std::move(l), 'f');
}

}  // namespace l1c
