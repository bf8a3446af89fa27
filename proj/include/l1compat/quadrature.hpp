#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "l1compat/subspace.hpp"
#include "l1compat/symbol.hpp"

namespace l1c {

// Surface area of S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(std::size_t n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Quadrature on S^{n-1}. Nodes are stored flat; the second half of the node
// list is the exact negation of the first half with equal weights, so every
// integrand that is odd under xi -> -xi sums to exactly zero.
struct QuadratureRule {
  std::size_t n = 0;
  unsigned level = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::size_t half() const noexcept { return weights.size() / 2; }
  std::span<const double> node(std::size_t i) const { return {nodes.data() + i * n, n}; }
};

namespace quad_detail {

// Gauss rule for the weight (1 - t^2)^a on [-1, 1] by Golub-Welsch, with nodes
// mirrored so that t_{m-1-i} = -t_i exactly.
inline void gauss_symmetric_jacobi(std::size_t m, double a, std::vector<double>& t, std::vector<double>& w) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sub(m > 1 ? m - 1 : 0);
  for (std::size_t k = 1; k < m; ++k) {
    const double kk = static_cast<double>(k);
    sub(k - 1) = std::sqrt(kk * (kk + 2 * a) / ((2 * kk + 2 * a + 1) * (2 * kk + 2 * a - 1)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(a + 1) / std::tgamma(a + 1.5);
  t.assign(m, 0.0);
  w.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    t[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
  for (std::size_t i = 0; i < m / 2; ++i) {
    const std::size_t j = m - 1 - i;
    const double tt = 0.5 * (t[j] - t[i]);
    const double ww = 0.5 * (w[i] + w[j]);
    t[i] = -tt;
    t[j] = tt;
    w[i] = w[j] = ww;
  }
  if (m % 2) t[m / 2] = 0.0;
}

inline void append_negated_half(QuadratureRule& r) {
  const std::size_t h = r.weights.size();
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t k = 0; k < r.n; ++k) r.nodes.push_back(-r.nodes[i * r.n + k]);
    r.weights.push_back(r.weights[i]);
  }
}

}  // namespace quad_detail

// n = 2: 2^level equally spaced angles with weights 2 pi / 2^level.
// n >= 3: product rule xi = (t, sqrt(1 - t^2) eta) with a 2^(level-1)-point
// Gauss rule for the weight (1 - t^2)^((n-3)/2) and the level-`level` rule on
// S^{n-2} for eta (Gauss-Legendre x uniform angles when n = 3).
inline QuadratureRule build_rule(std::size_t n, unsigned level) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "sphere quadrature needs n >= 2");
  if (level < 2) throw Error(ErrorKind::InvalidArgument, "quadrature level must be at least 2");
  QuadratureRule r;
  r.n = n;
  r.level = level;
  if (n == 2) {
    const std::size_t count = std::size_t{1} << level;
    const double w = 2.0 * std::numbers::pi / static_cast<double>(count);
    for (std::size_t i = 0; i < count / 2; ++i) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      r.nodes.push_back(std::cos(th));
      r.nodes.push_back(std::sin(th));
      r.weights.push_back(w);
    }
    quad_detail::append_negated_half(r);
    return r;
  }
  const QuadratureRule sub = build_rule(n - 1, level);
  const std::size_t m = std::size_t{1} << (level - 1);
  std::vector<double> t, wt;
  quad_detail::gauss_symmetric_jacobi(m, 0.5 * (static_cast<double>(n) - 3.0), t, wt);
  // Negative-t half with the full sub-rule; the rest is its negation.
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double s = std::sqrt((1.0 - t[i]) * (1.0 + t[i]));
    for (std::size_t j = 0; j < sub.size(); ++j) {
      r.nodes.push_back(t[i]);
      for (std::size_t k = 0; k < n - 1; ++k) r.nodes.push_back(s * sub.nodes[j * (n - 1) + k]);
      r.weights.push_back(wt[i] * sub.weights[j]);
    }
  }
  quad_detail::append_negated_half(r);
  return r;
}

// Sum of weight * f(node), accumulated pairwise (xi, -xi) in node order.
template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  const std::size_t h = rule.half();
  double acc = 0;
  for (std::size_t i = 0; i < h; ++i) acc += rule.weights[i] * f(rule.node(i)) + rule.weights[i + h] * f(rule.node(i + h));
  return acc;
}

// M_A as a matrix from E to V (x) Sym^{k-n}(R^n). Row (v, g) holds the
// coefficient of the symmetric tensor basis element attached to the
// multi-index gammas[g]; that element stands for multiplicity[g] equal
// entries of the full tensor v (x) xi (x) ... (x) xi, which the norm accounts for.
struct MomentMap {
  std::size_t n = 0, order = 0, dim_v = 0, dim_e = 0;
  std::vector<MultiIndex> gammas;
  std::vector<std::uint64_t> multiplicity;
  Matrix<double> matrix;          // (dim_v * gammas.size()) x dim_e
  std::vector<double> column_scale;  // area * max over nodes of |integrand of e_c|
  double error_estimate = 0;      // max entry difference to the next coarser level
  unsigned level = 0;
  std::size_t node_count = 0;

  std::vector<double> apply(std::span<const double> e) const {
    std::vector<double> r(matrix.rows(), 0.0);
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      for (std::size_t j = 0; j < dim_e; ++j) r[i] += matrix(i, j) * e[j];
    return r;
  }

  // Frobenius norm of the full tensor represented by a row vector of this map.
  double tensor_norm(std::span<const double> t) const {
    double s = 0;
    const std::size_t g = gammas.size();
    for (std::size_t v = 0; v < dim_v; ++v)
      for (std::size_t k = 0; k < g; ++k) s += static_cast<double>(multiplicity[k]) * t[v * g + k] * t[v * g + k];
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0;
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      for (std::size_t j = 0; j < matrix.cols(); ++j) m = std::max(m, std::abs(matrix(i, j)));
    return m;
  }
};

namespace quad_detail {

// Floating-point evaluation of A^dagger(xi) = adj G(xi) A*(xi) / det G(xi)
// from the exact polynomial data.
class PseudoInverseEvaluator {
 public:
  explicit PseudoInverseEvaluator(const OperatorSpec& a) : sym_(a.symbol()), dv_(a.source_dim()), de_(a.target_dim()) {
    auto data = pseudo_inverse_data(a);
    MatrixPolynomial d(1, 1, a.space_dim());
    d(0, 0) = data.det;
    det_ = NumericMatrixPolynomial(d);
    num_ = NumericMatrixPolynomial(data.numerator);
    for (const auto& p : probe_points(a.space_dim())) {
      std::vector<double> xi = to_double(p);
      double r = 0;
      for (double x : xi) r += x * x;
      for (double& x : xi) x /= std::sqrt(r);
      ref_ = std::max(ref_, std::pow(mean_square(xi), static_cast<double>(dv_)));
    }
  }

  // Writes A^dagger(xi) row-major (dim V x dim E) into out. Returns false when
  // det G(xi) falls below 1e-12 times (tr G / dim V)^dim V, taken as the
  // larger of its value at xi and its maximum over fixed probe directions.
  bool eval(std::span<const double> xi, std::vector<double>& out) const {
    double det = 0;
    det_.eval(xi, std::span<double>(&det, 1));
    const double scale = std::max(ref_, std::pow(mean_square(xi), static_cast<double>(dv_)));
    if (!(scale > 0) || !(det >= 1e-12 * scale)) return false;
    out.resize(dv_ * de_);
    num_.eval(xi, out);
    for (double& x : out) x /= det;
    return true;
  }

 private:
  // tr G(xi) / dim V
  double mean_square(std::span<const double> xi) const {
    a_.resize(de_ * dv_);
    sym_.eval(xi, a_);
    double tr = 0;
    for (double x : a_) tr += x * x;
    return tr / static_cast<double>(dv_);
  }

  NumericMatrixPolynomial sym_, det_, num_;
  std::size_t dv_, de_;
  double ref_ = 0;
  mutable std::vector<double> a_;
};

inline void check_moment_preconditions(const OperatorSpec& a) {
  if (!a.is_homogeneous()) throw Error(ErrorKind::NotHomogeneous, "moment map needs an operator of a single order");
  if (a.order() < a.space_dim())
    throw Error(ErrorKind::OrderTooLow, "moment map needs order k >= n (k = " + std::to_string(a.order()) +
                                            ", n = " + std::to_string(a.space_dim()) + ")");
}

}  // namespace quad_detail

// Evaluates M_A e = int_{S^{n-1}} A^dagger(xi) e (x)^{k-n} xi dH^{n-1} on one rule.
// `probes` are extra vectors whose integrand scale (area * max over nodes of
// the integrand norm) is reported in probe_scales.
inline MomentMap moment_map(const OperatorSpec& a, const QuadratureRule& rule,
                            const std::vector<std::vector<double>>& probes = {}, std::vector<double>* probe_scales = nullptr) {
  quad_detail::check_moment_preconditions(a);
  if (rule.n != a.space_dim()) throw Error(ErrorKind::InvalidArgument, "quadrature dimension differs from operator dimension");
  MomentMap mm;
  mm.n = a.space_dim();
  mm.order = a.order();
  mm.dim_v = a.source_dim();
  mm.dim_e = a.target_dim();
  mm.gammas = multi_indices_of_degree(mm.n, static_cast<unsigned>(mm.order - mm.n));
  for (const auto& g : mm.gammas) mm.multiplicity.push_back(g.multinomial());
  mm.level = rule.level;
  mm.node_count = rule.size();
  const std::size_t ng = mm.gammas.size(), dv = mm.dim_v, de = mm.dim_e;
  mm.matrix = Matrix<double>(dv * ng, de);
  mm.column_scale.assign(de, 0.0);
  std::vector<double> probe_max(probes.size(), 0.0);

  const quad_detail::PseudoInverseEvaluator pinv_eval(a);
  std::vector<double> mono(ng), pinv[2];
  const std::size_t h = rule.half();
  for (std::size_t i = 0; i < h; ++i) {
    for (int side = 0; side < 2; ++side) {
      const auto xi = rule.node(i + side * h);
      if (!pinv_eval.eval(xi, pinv[side]))
        throw Error(ErrorKind::NearSingularSymbol, "A*A is numerically singular on the unit sphere");
    }
    const auto xp = rule.node(i);
    const auto xm = rule.node(i + h);
    std::vector<double> mono_m(ng);
    for (std::size_t g = 0; g < ng; ++g) {
      double p = 1, q = 1;
      for (std::size_t k = 0; k < mm.n; ++k)
        for (unsigned e = 0; e < mm.gammas[g][k]; ++e) {
          p *= xp[k];
          q *= xm[k];
        }
      mono[g] = p;
      mono_m[g] = q;
    }
    const double wp = rule.weights[i], wm = rule.weights[i + h];
    for (std::size_t v = 0; v < dv; ++v)
      for (std::size_t g = 0; g < ng; ++g)
        for (std::size_t c = 0; c < de; ++c)
          mm.matrix(v * ng + g, c) += wp * (pinv[0][v * de + c] * mono[g]) + wm * (pinv[1][v * de + c] * mono_m[g]);
    // integrand magnitudes
    for (int side = 0; side < 2; ++side) {
      const auto& mo = side ? mono_m : mono;
      for (std::size_t c = 0; c < de; ++c) {
        double s = 0;
        for (std::size_t v = 0; v < dv; ++v)
          for (std::size_t g = 0; g < ng; ++g) {
            const double t = pinv[side][v * de + c] * mo[g];
            s += static_cast<double>(mm.multiplicity[g]) * t * t;
          }
        mm.column_scale[c] = std::max(mm.column_scale[c], std::sqrt(s));
      }
      for (std::size_t p = 0; p < probes.size(); ++p) {
        double s = 0;
        for (std::size_t v = 0; v < dv; ++v) {
          double pv = 0;
          for (std::size_t c = 0; c < de; ++c) pv += pinv[side][v * de + c] * probes[p][c];
          for (std::size_t g = 0; g < ng; ++g) s += static_cast<double>(mm.multiplicity[g]) * pv * pv * mo[g] * mo[g];
        }
        probe_max[p] = std::max(probe_max[p], std::sqrt(s));
      }
    }
  }
  const double area = sphere_area(mm.n);
  for (auto& s : mm.column_scale) s *= area;
  if (probe_scales) {
    probe_scales->clear();
    for (double p : probe_max) probe_scales->push_back(p * area);
  }
  return mm;
}

struct MomentOptions {
  double tol = 1e-8;
  unsigned start_level = 0;  // 0: per-dimension default
  unsigned max_level = 0;    // 0: per-dimension default
};

inline unsigned default_start_level(std::size_t n) { return n == 2 ? 6 : n == 3 ? 4 : 3; }
inline unsigned default_max_level(std::size_t n) { return n == 2 ? 16 : n == 3 ? 8 : n == 4 ? 7 : 5; }

// Refines until two successive levels agree entrywise within
// tol * max(largest column scale, largest entry); the finer map is returned
// with the difference as its error estimate.
inline MomentMap moment_map_converged(const OperatorSpec& a, const MomentOptions& opt = {},
                                      const std::vector<std::vector<double>>& probes = {},
                                      std::vector<double>* probe_scales = nullptr) {
  quad_detail::check_moment_preconditions(a);
  const std::size_t n = a.space_dim();
  const unsigned start = opt.start_level ? opt.start_level : default_start_level(n);
  const unsigned stop = opt.max_level ? opt.max_level : default_max_level(n);
  MomentMap prev = moment_map(a, build_rule(n, start));
  double last_diff = 0;
  for (unsigned level = start + 1; level <= stop; ++level) {
    std::vector<double> scales;
    MomentMap cur = moment_map(a, build_rule(n, level), probes, &scales);
    double diff = 0;
    for (std::size_t i = 0; i < cur.matrix.rows(); ++i)
      for (std::size_t j = 0; j < cur.matrix.cols(); ++j) diff = std::max(diff, std::abs(cur.matrix(i, j) - prev.matrix(i, j)));
    double ref = cur.max_abs();
    for (double s : cur.column_scale) ref = std::max(ref, s);
    cur.error_estimate = diff;
    last_diff = diff;
    if (diff <= opt.tol * ref) {
      if (probe_scales) *probe_scales = std::move(scales);
      return cur;
    }
    prev = std::move(cur);
  }
  throw Error(ErrorKind::QuadratureNotConverged,
              "moment map did not converge by level " + std::to_string(stop) + " (last difference " + std::to_string(last_diff) + ")");
}

struct MomentEntry {
  RationalVector e;
  double norm = 0;   // |M_A e|
  double scale = 0;  // area * max over nodes of |A^dagger(xi) e (x)^{k-n} xi|
};

struct WeakCancellationResult {
  bool holds = false;
  bool vacuous = false;
  double tol = 1e-8;
  std::vector<MomentEntry> moments;
  std::optional<MomentMap> map;
};

// Decides M_A e = 0 for every basis vector e of S (I_A for weak cancellation,
// I_A cap K_C for CWC): holds iff |M_A e| <= tol * scale(e) for all of them.
inline WeakCancellationResult check_weak_cancellation(const OperatorSpec& a, const Subspace& s, const MomentOptions& opt = {}) {
  quad_detail::check_moment_preconditions(a);
  WeakCancellationResult r;
  r.tol = opt.tol;
  if (s.is_zero()) {
    r.holds = true;
    r.vacuous = true;
    return r;
  }
  std::vector<std::vector<double>> probes;
  for (const auto& e : s.basis()) probes.push_back(to_double(e));
  std::vector<double> scales;
  MomentMap mm = moment_map_converged(a, opt, probes, &scales);
  r.holds = true;
  const auto basis = s.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    MomentEntry m;
    m.e = basis[i];
    m.norm = mm.tensor_norm(mm.apply(probes[i]));
    m.scale = scales[i];
    if (m.norm > opt.tol * m.scale) r.holds = false;
    r.moments.push_back(std::move(m));
  }
  r.map = std::move(mm);
  return r;
}

}  // namespace l1c
