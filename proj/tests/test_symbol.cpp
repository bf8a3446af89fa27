#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "l1compat/dsl.hpp"
#include "l1compat/sturm.hpp"
#include "l1compat/subspace.hpp"
#include "l1compat/symbol.hpp"
#include "test_support.hpp"

using namespace l1c;

namespace {

Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

Polynomial norm2(std::size_t n) {
  Polynomial p(n);
  for (std::size_t i = 0; i < n; ++i) p = p + var(n, i) * var(n, i);
  return p;
}

// Numerical rank by SVD, independent of the exact elimination code.
std::size_t numeric_rank(const RationalMatrix& m, double tol = 1e-10) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j).get_d();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto s = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++r;
  return r;
}

// Leibniz-formula determinant, an oracle for small matrices.
Rational leibniz_det(const RationalMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rational total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    Rational term = inversions % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) term *= m(i, perm[i]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

const char* kDivCurl =
    "from 3 to 4\nrows: d1 u1 + d2 u2 + d3 u3; d2 u3 - d3 u2; d3 u1 - d1 u3; d1 u2 - d2 u1";

}  // namespace

TEST(Polynomial, ArithmeticAndDegrees) {
  const Polynomial x = var(2, 0), y = var(2, 1);
  const Polynomial p = (x + y) * (x - y);
  EXPECT_EQ(p, x * x - y * y);
  EXPECT_EQ(p.homogeneous_degree(), 2u);
  EXPECT_EQ((x + Polynomial::constant(2, 1)).homogeneous_degree(), std::nullopt);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ((x + y).pow(3).coefficient(MultiIndex{2, 1}), 3);
  EXPECT_EQ((x * x * y).derivative(MultiIndex{1, 1}), 2 * x);
  const std::vector<Rational> pt{Rational(1, 2), Rational(3)};
  EXPECT_EQ(p.eval(std::span<const Rational>(pt)), Rational(1, 4) - 9);
}

TEST(MultiIndex, OrderingAndCounts) {
  const auto idx = multi_indices_of_degree(3, 2);
  ASSERT_EQ(idx.size(), 6u);
  EXPECT_EQ(idx.front(), (MultiIndex{2, 0, 0}));
  EXPECT_EQ(idx.back(), (MultiIndex{0, 0, 2}));
  EXPECT_EQ((MultiIndex{1, 1, 0}).multinomial(), 2u);
  EXPECT_EQ((MultiIndex{2, 1, 0}).factorial(), 2);
}

TEST(LinearAlgebra, RrefNullspaceSubspace) {
  RationalMatrix m(2, 3);
  m(0, 0) = 1; m(0, 1) = 2; m(0, 2) = 3;
  m(1, 0) = 2; m(1, 1) = 4; m(1, 2) = 6;
  EXPECT_EQ(rank(m), 1u);
  const auto ns = nullspace(m);
  ASSERT_EQ(ns.size(), 2u);
  for (const auto& v : ns) EXPECT_TRUE(is_zero(m * v));
  const auto k = Subspace::kernel_of(m);
  const auto e1 = Subspace::span(3, {unit_vector(3, 0)});
  EXPECT_TRUE(k.intersect(e1).is_zero());
  EXPECT_EQ(k.orthogonal_complement(), Subspace::span(3, {{1, 2, 3}}));
  EXPECT_EQ(Subspace::span(3, {{2, 4, 6}, {1, 2, 3}}), Subspace::span(3, {{1, 2, 3}}));
  EXPECT_EQ(determinant(RationalMatrix::identity(3)), 1);
}

TEST(Symbol, GradientSymbolAndEval) {
  const auto grad = parse_operator("rows: d1 f1; d2 f1", 2);
  const auto& s = symbol(grad);
  EXPECT_EQ(s(0, 0), var(2, 0));
  EXPECT_EQ(s(1, 0), var(2, 1));
  const std::vector<Rational> xi{1, 2};
  const auto v = eval(s, xi);
  EXPECT_EQ(v(0, 0), 1);
  EXPECT_EQ(v(1, 0), 2);
}

TEST(Symbol, DivCurlSymbolHasFullRankAtAxis) {
  const auto dc = parse_operator(kDivCurl, 3);
  EXPECT_EQ(dc.symbol()(0, 0), var(3, 0));
  EXPECT_EQ(dc.symbol()(1, 1), -var(3, 2));
  const std::vector<Rational> xi{1, 0, 0};
  EXPECT_EQ(numeric_rank(eval(dc.symbol(), xi)), 3u);
}

TEST(Symbol, VanishesAtOriginForPositiveDegrees) {
  const auto dc = parse_operator(kDivCurl, 3);
  const std::vector<Rational> zero(3, Rational(0));
  EXPECT_TRUE(eval(dc.symbol(), zero) == RationalMatrix(4, 3));
}

TEST(Gram, GradientAndLaplacian) {
  const auto g = gram(parse_operator("rows: d1 f1; d2 f1", 2));
  ASSERT_EQ(g.rows(), 1u);
  EXPECT_EQ(g(0, 0), norm2(2));
  const auto lap = parse_operator("rows: (d1^2 + d2^2) u1; (d1^2 + d2^2) u2", 2);
  const auto gl = gram(lap);
  const Polynomial r4 = norm2(2) * norm2(2);
  EXPECT_EQ(gl, MatrixPolynomial::identity(2, 2, r4));
  EXPECT_TRUE(gram(OperatorSpec::zero(2, 2, 3)).is_zero());
}

TEST(DetAdj, LaplacianGram) {
  const Polynomial r4 = norm2(2).pow(2);
  const auto [det, adj] = det_adj(MatrixPolynomial::identity(2, 2, r4));
  EXPECT_EQ(det, r4.pow(2));
  EXPECT_EQ(adj, MatrixPolynomial::identity(2, 2, r4));
}

TEST(DetAdj, OneByOne) {
  MatrixPolynomial g(1, 1, 2);
  g(0, 0) = norm2(2);
  const auto [det, adj] = det_adj(g);
  EXPECT_EQ(det, norm2(2));
  EXPECT_EQ(adj(0, 0), Polynomial::constant(2, 1));
}

TEST(DetAdj, RandomMatricesSatisfyAdjugateIdentity) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto op = gen::random_operator(rng, 3, 3, {1, 1, 1}, 0.8);
    const MatrixPolynomial& g = op.symbol();
    const auto [det, adj] = det_adj(g);
    EXPECT_EQ(g * adj, MatrixPolynomial::identity(3, 3, det));
    EXPECT_EQ(adj * g, MatrixPolynomial::identity(3, 3, det));
    for (int k = 0; k < 5; ++k) {
      const auto xi = gen::random_nonzero_vector(rng, 3);
      EXPECT_EQ(det.eval(std::span<const Rational>(xi)), leibniz_det(g.eval(std::span<const Rational>(xi))));
    }
  }
}

TEST(Annihilator, Gradient) {
  const auto l = annihilator(parse_operator("rows: d1 f1; d2 f1", 2));
  const Polynomial x = var(2, 0), y = var(2, 1);
  EXPECT_EQ(l.symbol()(0, 0), y * y);
  EXPECT_EQ(l.symbol()(0, 1), -(x * y));
  EXPECT_EQ(l.symbol()(1, 0), -(x * y));
  EXPECT_EQ(l.symbol()(1, 1), x * x);
}

TEST(Annihilator, VectorLaplacianIsTrivial) {
  const auto l = annihilator(parse_operator("rows: (d1^2 + d2^2) u1; (d1^2 + d2^2) u2", 2));
  EXPECT_TRUE(l.symbol().is_zero());
}

TEST(Annihilator, DivCurlKernelMatchesImage) {
  const auto a = parse_operator(kDivCurl, 3);
  const auto l = annihilator(a);
  EXPECT_FALSE(l.symbol().is_zero());
  EXPECT_TRUE((l.symbol() * a.symbol()).is_zero());
  std::mt19937_64 rng(22);
  for (int k = 0; k < 20; ++k) {
    const auto xi = gen::random_nonzero_vector(rng, 3);
    const auto lx = l.symbol().eval(std::span<const Rational>(xi));
    const auto ax = a.symbol().eval(std::span<const Rational>(xi));
    EXPECT_EQ(4 - numeric_rank(lx), numeric_rank(ax));
    EXPECT_EQ(numeric_rank(ax), 3u);
  }
}

TEST(Annihilator, NonEllipticIsRejected) {
  EXPECT_THROW(annihilator(parse_operator("rows: d1 f1 + d2 f2", 2)), Error);
  EXPECT_THROW(annihilator(parse_operator("rows: (d1^4 + d2^4) u1; d3^4 u2; d4^4 u2", 4)), Error);
}

TEST(SymbolProperty, LinearityInCoefficients) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = gen::random_operator(rng, 3, 2, {2, 1}), b = gen::random_operator(rng, 3, 2, {2, 1});
    EXPECT_EQ(symbol(a + b), symbol(a) + symbol(b));
    const auto ca = a.coefficients(), cb = b.coefficients(), cab = (a + b).coefficients();
    for (const auto& [alpha, m] : cab) {
      RationalMatrix expect(2, 2);
      if (ca.count(alpha)) expect = expect + ca.at(alpha);
      if (cb.count(alpha)) expect = expect + cb.at(alpha);
      EXPECT_EQ(m, expect);
    }
  }
}

TEST(SymbolProperty, CoefficientExtractionReproducesSymbol) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = gen::random_operator(rng, 3, 3, {2, 2, 0});
    EXPECT_EQ(OperatorSpec::from_coefficients(3, 3, 3, a.coefficients()), a);
  }
}

TEST(SymbolProperty, GramSymmetricPositiveSemidefinite) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = gen::random_operator(rng, 3, 3, {2, 2, 2, 2});
    const auto g = gram(a);
    EXPECT_EQ(g, g.transpose());
    EXPECT_EQ(g.row_degree(0).value_or(4), 4u);
    for (int k = 0; k < 5; ++k) {
      const auto xi = gen::random_nonzero_vector(rng, 3);
      const auto x = gen::random_nonzero_vector(rng, 3);
      const auto gx = g.eval(std::span<const Rational>(xi));
      EXPECT_GE(dot(x, gx * x), 0);
    }
  }
}

TEST(SymbolProperty, AnnihilatorIdentityAndHomogeneity) {
  std::mt19937_64 rng(26);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 12; ++trial) {
    const std::size_t n = 2 + trial % 2, v = 1 + trial % 2, e = v + 1 + trial % 2;
    const unsigned k = 1 + trial % 2;
    const auto a = gen::random_operator(rng, n, v, std::vector<unsigned>(e, k), 0.9);
    OperatorSpec l;
    try {
      l = annihilator(a);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    EXPECT_TRUE((l.symbol() * a.symbol()).is_zero());
    for (std::size_t i = 0; i < e; ++i)
      for (std::size_t j = 0; j < e; ++j) {
        if (l.symbol()(i, j).is_zero()) continue;
        EXPECT_EQ(l.symbol()(i, j).homogeneous_degree(), 2 * k * v);
      }
  }
  EXPECT_GE(checked, 8);
}

TEST(SymbolProperty, EvaluationCommutesWithProducts) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = gen::random_operator(rng, 3, 3, {1, 2}).symbol();
    const auto q = gen::random_operator(rng, 3, 2, {1, 1, 2}).symbol();
    const auto xi = gen::random_nonzero_vector(rng, 3);
    const std::span<const Rational> s(xi);
    EXPECT_EQ((p * q).eval(s), p.eval(s) * q.eval(s));
  }
}

TEST(Sturm, CountsDistinctRealRoots) {
  // (t - 1)(t - 2)(t + 3) = t^3 - 7 t + 6
  const UnivariatePolynomial cubic({6, -7, 0, 1});
  EXPECT_EQ(count_real_roots(cubic), 3);
  EXPECT_EQ(count_real_roots(cubic, 0, Rational(3, 2)), 1);
  EXPECT_EQ(count_real_roots(UnivariatePolynomial({1, 0, 1})), 0);
  EXPECT_EQ(count_real_roots(UnivariatePolynomial({1, -2, 1})), 1);
  const auto r = smallest_real_root(cubic);
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(r->exact);
  EXPECT_EQ(r->value, -3);
  const auto irr = smallest_real_root(UnivariatePolynomial({-2, 0, 1}));
  ASSERT_TRUE(irr.has_value());
  EXPECT_NEAR(irr->value.get_d(), -std::sqrt(2.0), 1e-8);
}
