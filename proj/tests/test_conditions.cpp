#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "l1compat/conditions.hpp"
#include "l1compat/dsl.hpp"
#include "l1compat/ellipticity.hpp"
#include "test_support.hpp"

using namespace l1c;

namespace {

Eigen::MatrixXd to_eigen(const RationalMatrix& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j).get_d();
  return a;
}

// Orthonormal basis of the numerical nullspace of a (columns).
Eigen::MatrixXd numeric_null(const Eigen::MatrixXd& a, double tol = 1e-10) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, smax)) ++r;
  return svd.matrixV().rightCols(cols - r);
}

// Sampling oracle: numerical intersection of ker C(xi) over random xi.
Eigen::MatrixXd sampled_kernel_intersection(const OperatorSpec& c, std::mt19937_64& rng, int samples = 100) {
  Eigen::MatrixXd stack(0, c.source_dim());
  for (int k = 0; k < samples; ++k) {
    const auto xi = gen::random_nonzero_vector(rng, c.space_dim());
    Eigen::MatrixXd cx = to_eigen(c.symbol().eval(std::span<const Rational>(xi)));
    for (Eigen::Index r = 0; r < cx.rows(); ++r) {
      const double nrm = cx.row(r).norm();
      if (nrm > 0) cx.row(r) /= nrm;
    }
    Eigen::MatrixXd next(stack.rows() + cx.rows(), stack.cols());
    next << stack, cx;
    stack = next;
  }
  return numeric_null(stack);
}

// Sampling oracle: dimension of the intersection of im A(xi) over random xi.
std::size_t sampled_image_intersection_dim(const OperatorSpec& a, std::mt19937_64& rng, int samples = 20) {
  Eigen::MatrixXd stack(0, a.target_dim());
  for (int k = 0; k < samples; ++k) {
    const auto xi = gen::random_nonzero_vector(rng, a.space_dim());
    const Eigen::MatrixXd ax = to_eigen(a.symbol().eval(std::span<const Rational>(xi)));
    const Eigen::MatrixXd left = numeric_null(ax.transpose());  // (im A(xi))^perp
    Eigen::MatrixXd next(stack.rows() + left.cols(), stack.cols());
    next << stack, left.transpose();
    stack = next;
  }
  return static_cast<std::size_t>(numeric_null(stack).cols());
}

Subspace span_of(std::size_t dim, std::initializer_list<std::size_t> axes) {
  std::vector<RationalVector> v;
  for (auto i : axes) v.push_back(unit_vector(dim, i));
  return Subspace::span(dim, v);
}

const char* kDivCurlSystem = R"(dim 3
operator A {
  from 3 to 4
  rows: d1 u1 + d2 u2 + d3 u3; d2 u3 - d3 u2; d3 u1 - d1 u3; d1 u2 - d2 u1
}
constraint C {
  from 4 to 1
  rows: d1 f1 + d2 f2 + d3 f3
})";

std::string vector_laplacian(std::size_t n, bool with_div) {
  std::string lap = "(";
  for (std::size_t i = 1; i <= n; ++i) lap += (i > 1 ? " + d" : "d") + std::to_string(i) + "^2";
  lap += ")";
  std::string s = "dim " + std::to_string(n) + "\noperator A {\n  rows: ";
  for (std::size_t i = 1; i <= n; ++i) s += (i > 1 ? "; " : "") + lap + " u" + std::to_string(i);
  s += "\n}\n";
  if (with_div) {
    s += "constraint C {\n  rows: ";
    for (std::size_t i = 1; i <= n; ++i) s += (i > 1 ? " + d" : "d") + std::to_string(i) + " f" + std::to_string(i);
    s += "\n}\n";
  }
  return s;
}

}  // namespace

TEST(Homogenize, HomogeneousInputUnchanged) {
  const auto c = parse_operator("rows: d1 f1 + d2 f2; d2 f1", 2);
  EXPECT_EQ(homogenize(c), c);
}

TEST(Homogenize, MixedRowsArePadded) {
  const auto c = parse_operator("rows: f1; d1 f2", 2);
  const auto h = homogenize(c);
  EXPECT_EQ(h, parse_operator("rows: d1 f1; d2 f1; d1 f2", 2));
  EXPECT_TRUE(kernel_intersection(c).is_zero());
  EXPECT_TRUE(coefficient_kernel(h).is_zero());
}

TEST(Homogenize, ScalarRowPaddedToDegreeTwo) {
  for (std::size_t n = 1; n <= 4; ++n) {
    // a degree-2 row in a second component forces l = 2
    const auto c = parse_operator("from 2 to 2\nrows: f1; d1^2 f2", n);
    const auto h = homogenize(c);
    EXPECT_EQ(h.target_dim(), n * (n + 1) / 2 + 1);
    std::set<MultiIndex> monomials;
    for (std::size_t r = 0; r + 1 < h.target_dim(); ++r) {
      ASSERT_EQ(h.symbol()(r, 0).term_count(), 1u);
      monomials.insert(h.symbol()(r, 0).terms().begin()->first);
    }
    EXPECT_EQ(monomials.size(), n * (n + 1) / 2);
    EXPECT_TRUE(kernel_intersection(c).is_zero());
  }
}

TEST(KernelIntersection, StandardExamples) {
  for (std::size_t n = 2; n <= 4; ++n) EXPECT_TRUE(kernel_intersection(parse_system(vector_laplacian(n, true)).C.value()).is_zero());
  EXPECT_EQ(kernel_intersection(parse_operator("from 4 to 1\nrows: d1 f1 + d2 f2 + d3 f3", 3)), span_of(4, {3}));
  EXPECT_EQ(kernel_intersection(parse_operator("from 3 to 1\nrows: d1 f1 + d2 f2", 4)), span_of(3, {2}));
}

TEST(ImageIntersection, Examples) {
  EXPECT_TRUE(image_intersection(parse_operator("rows: d1 f1; d2 f1", 2)).is_zero());
  for (std::size_t n = 2; n <= 3; ++n) EXPECT_TRUE(image_intersection(parse_system(vector_laplacian(n, false)).A).is_full());
  EXPECT_EQ(image_intersection(parse_system(kDivCurlSystem).A), span_of(4, {0}));
}

TEST(ImageIntersection, GradientCoefficientOracle) {
  // common nullspace of the annihilator coefficients {[[0,0],[0,1]], [[1,0],[0,0]], [[0,-1],[-1,0]]}
  RationalMatrix stack(6, 2);
  stack(1, 1) = 1;
  stack(2, 0) = 1;
  stack(4, 1) = -1;
  stack(5, 0) = -1;
  EXPECT_EQ(Subspace::kernel_of(stack), image_intersection(parse_operator("rows: d1 f1; d2 f1", 2)));
}

TEST(CheckCC, Examples) {
  const auto dc = check_CC(parse_system(kDivCurlSystem));
  EXPECT_TRUE(dc.holds);
  EXPECT_EQ(dc.image_intersection, span_of(4, {0}));
  EXPECT_EQ(dc.kernel_intersection, span_of(4, {3}));
  EXPECT_FALSE(dc.witness.has_value());

  for (std::size_t n = 2; n <= 3; ++n) EXPECT_TRUE(check_CC(parse_system(vector_laplacian(n, true))).holds);

  const auto free = check_CC(parse_system(vector_laplacian(2, false)));
  EXPECT_FALSE(free.holds);
  ASSERT_TRUE(free.witness.has_value());
  EXPECT_EQ(*free.witness, unit_vector(2, 0));
  EXPECT_TRUE(free.common.contains(*free.witness));
}

TEST(Ellipticity, Examples) {
  const auto grad = is_elliptic(parse_operator("rows: d1 f1; d2 f1", 2));
  EXPECT_EQ(grad.verdict, Ellipticity::Yes);

  const auto div = is_elliptic(parse_operator("rows: d1 f1 + d2 f2", 2));
  EXPECT_EQ(div.verdict, Ellipticity::No);
  ASSERT_TRUE(div.witness_xi && div.kernel_vector);
  EXPECT_EQ(*div.witness_xi, (RationalVector{1, 0}));
  EXPECT_EQ(*div.kernel_vector, (RationalVector{0, 1}));

  const auto r4 = is_elliptic(parse_operator("rows: (d1^4 + d2^4) u1; d3^4 u2; d4^4 u2", 4));
  EXPECT_EQ(r4.verdict, Ellipticity::No);
  ASSERT_TRUE(r4.witness_xi && r4.kernel_vector);
  EXPECT_EQ(*r4.witness_xi, (RationalVector{0, 0, 1, 0}));
  EXPECT_EQ(*r4.kernel_vector, (RationalVector{1, 0}));
}

TEST(Ellipticity, WitnessIsAnExactKernelVector) {
  std::mt19937_64 rng(31);
  int no = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto a = gen::random_operator(rng, n, 2, {1, 1}, 0.5);
    const auto v = is_elliptic(a);
    if (v.verdict != Ellipticity::No || !v.witness_xi) continue;
    ++no;
    ASSERT_TRUE(v.kernel_vector.has_value());
    EXPECT_FALSE(is_zero(*v.witness_xi));
    EXPECT_FALSE(is_zero(*v.kernel_vector));
    EXPECT_TRUE(is_zero(a.symbol().eval(std::span<const Rational>(*v.witness_xi)) * *v.kernel_vector));
  }
  EXPECT_GT(no, 0);
}

TEST(Ellipticity, OneDimension) {
  EXPECT_EQ(is_elliptic(parse_operator("rows: d1^3 f1; 2 d1^3 f2", 1)).verdict, Ellipticity::Yes);
  EXPECT_EQ(is_elliptic(parse_operator("rows: d1 f1 + d1 f2", 1)).verdict, Ellipticity::No);
}

TEST(Ellipticity, TwoDimensionsIrrationalZero) {
  // xi1^2 - 2 xi2^2 vanishes only on irrational directions
  const auto v = is_elliptic(parse_operator("rows: (d1^2 - 2 d2^2) f1", 2));
  EXPECT_EQ(v.verdict, Ellipticity::No);
  ASSERT_EQ(v.witness_xi_approx.size(), 2u);
  const double x = v.witness_xi_approx[0], y = v.witness_xi_approx[1];
  EXPECT_NEAR(x * x - 2 * y * y, 0.0, 1e-6);
  EXPECT_EQ(is_elliptic(parse_operator("rows: (d1^2 + d1 d2 + d2^2) f1", 2)).verdict, Ellipticity::Yes);
}

TEST(Ellipticity, SampledInHigherDimensions) {
  EXPECT_EQ(is_elliptic(parse_system(kDivCurlSystem).A).verdict, Ellipticity::NumericallyPositive);
  EXPECT_EQ(is_elliptic(parse_system(vector_laplacian(3, false)).A).verdict, Ellipticity::NumericallyPositive);
  const auto cone = is_elliptic(parse_operator("rows: (d1^2 + d2^2 - 2 d3^2) f1", 3));
  EXPECT_EQ(cone.verdict, Ellipticity::No);
  const auto irr = is_elliptic(parse_operator("rows: (d1^2 + d2^2 - 3 d3^2) f1", 3));
  EXPECT_NE(irr.verdict, Ellipticity::Yes);
  EXPECT_NE(irr.verdict, Ellipticity::NumericallyPositive);
}

TEST(Ellipticity, MixedOrdersRejected) {
  try {
    is_elliptic(parse_operator("rows: f1; d1 f1", 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHomogeneous);
  }
}

TEST(ConditionsProperty, KernelIntersectionMatchesSamplingOracle) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 3, e = 2 + trial % 3;
    std::vector<unsigned> degrees{static_cast<unsigned>(trial % 3), 1};
    if (trial % 2) degrees.push_back(2);
    const auto c = gen::random_operator(rng, n, e, degrees, 0.5);
    const auto k = kernel_intersection(c);
    const auto oracle = sampled_kernel_intersection(c, rng);
    EXPECT_EQ(static_cast<Eigen::Index>(k.dim()), oracle.cols()) << to_dsl(c);
    for (int s = 0; s < 100; ++s) {
      const auto xi = gen::random_nonzero_vector(rng, n);
      const auto cx = c.symbol().eval(std::span<const Rational>(xi));
      for (const auto& v : k.basis()) EXPECT_TRUE(is_zero(cx * v));
    }
  }
}

TEST(ConditionsProperty, ImageIntersectionAgainstPointwiseImages) {
  std::mt19937_64 rng(33);
  std::vector<OperatorSpec> ops{parse_system(kDivCurlSystem).A, parse_operator("rows: d1 f1; d2 f1", 2),
                                parse_system(vector_laplacian(3, false)).A};
  for (int trial = 0; trial < 6; ++trial) {
    // block operators (B, 0; 0, -Laplacian) have a nontrivial image intersection
    const auto b = gen::random_operator(rng, 2, 1, {2, 2}, 1.0);
    MatrixPolynomial s(3, 2, 2);
    s(0, 0) = b.symbol()(0, 0);
    s(1, 0) = b.symbol()(1, 0);
    s(2, 1) = (Polynomial::variable(2, 0) * Polynomial::variable(2, 0) + Polynomial::variable(2, 1) * Polynomial::variable(2, 1));
    const OperatorSpec op(s);
    if (is_elliptic(op).verdict != Ellipticity::Yes) continue;
    ops.push_back(op);
  }
  for (const auto& a : ops) {
    const auto l = annihilator(a);
    const auto ia = image_intersection(a);
    EXPECT_EQ(ia.dim(), sampled_image_intersection_dim(a, rng)) << to_dsl(a);
    for (int s = 0; s < 20; ++s) {
      const auto xi = gen::random_nonzero_vector(rng, a.space_dim());
      const auto ax = a.symbol().eval(std::span<const Rational>(xi));
      const auto lx = l.symbol().eval(std::span<const Rational>(xi));
      EXPECT_EQ(a.target_dim() - rank(lx), a.source_dim());
      for (const auto& e : ia.basis()) EXPECT_TRUE(solve(ax, e).has_value());
    }
  }
}

TEST(ConditionsProperty, BasisChangeInvariance) {
  std::mt19937_64 rng(34);
  const auto base = parse_system(kDivCurlSystem);
  const auto lap = parse_system(vector_laplacian(2, true));
  const auto free = parse_system(vector_laplacian(2, false));
  for (const SystemSpec* sys : {&base, &lap, &free}) {
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t e = sys->A.target_dim();
      RationalMatrix g;
      do g = gen::random_matrix(rng, e, e);
      while (determinant(g) == 0);
      const RationalMatrix gi = *inverse(g);
      SystemSpec t = *sys;
      t.A = OperatorSpec(MatrixPolynomial::constant(g, sys->n) * sys->A.symbol(), 'u');
      if (sys->C) t.C = OperatorSpec(sys->C->symbol() * MatrixPolynomial::constant(gi, sys->n));
      const auto r0 = check_CC(*sys), r1 = check_CC(t);
      EXPECT_EQ(r0.holds, r1.holds);
      EXPECT_EQ(r0.image_intersection.is_zero(), r1.image_intersection.is_zero());
      EXPECT_EQ(r0.kernel_intersection.is_zero(), r1.kernel_intersection.is_zero());
      EXPECT_EQ(r1.image_intersection, r0.image_intersection.mapped(g));
      EXPECT_EQ(r1.kernel_intersection, r0.kernel_intersection.mapped(g));
    }
  }
}

TEST(ConditionsProperty, ScalingInvariance) {
  for (const auto& text : {std::string(kDivCurlSystem), vector_laplacian(2, true), vector_laplacian(2, false)}) {
    const auto sys = parse_system(text);
    const auto r0 = check_CC(sys);
    for (const Rational& c : {Rational(-3), Rational(2, 7)}) {
      SystemSpec t = sys;
      t.A = OperatorSpec(c * sys.A.symbol(), 'u');
      if (sys.C) t.C = OperatorSpec(c * sys.C->symbol());
      const auto r1 = check_CC(t);
      EXPECT_EQ(r0.holds, r1.holds);
      EXPECT_EQ(r0.image_intersection, r1.image_intersection);
      EXPECT_EQ(r0.kernel_intersection, r1.kernel_intersection);
      EXPECT_EQ(is_elliptic(sys.A).verdict, is_elliptic(t.A).verdict);
    }
  }
}

TEST(ConditionsProperty, HomogenizeIdempotent) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = gen::random_operator(rng, 3, 3, {0, 1, 2}, 0.6);
    const auto h = homogenize(c);
    EXPECT_EQ(homogenize(h), h);
    EXPECT_EQ(coefficient_kernel(h), kernel_intersection(c));
  }
}
