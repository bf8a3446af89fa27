#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "l1compat/sturm.hpp"
#include "l1compat/subspace.hpp"
#include "l1compat/symbol.hpp"

namespace l1c {

enum class Ellipticity { Yes, No, NumericallyPositive, Inconclusive };

constexpr std::string_view to_string(Ellipticity e) {
  switch (e) {
    case Ellipticity::Yes: return "yes";
    case Ellipticity::No: return "no";
    case Ellipticity::NumericallyPositive: return "numerically_positive";
    case Ellipticity::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct EllipticityVerdict {
  Ellipticity verdict = Ellipticity::Inconclusive;
  // For No: a direction xi != 0 with a nonzero kernel vector of A(xi).
  std::optional<RationalVector> witness_xi;               // exact when available
  std::optional<RationalVector> kernel_vector;            // exact when available
  std::vector<double> witness_xi_approx;                  // always filled for No
  std::vector<double> kernel_vector_approx;
  // For the sampled decision: min det G / max det G over the sphere samples.
  std::optional<double> normalized_min;
  std::string method;
};

struct EllipticityOptions {
  double threshold = 1e-9;
  std::size_t samples = 10000;
  std::size_t refine_starts = 12;
};

namespace elliptic_detail {

// Nonzero vectors of {-1,0,1}^n up to sign, axes first, then by support size,
// each group in lexicographic order of the index tuple.
inline std::vector<RationalVector> small_directions(std::size_t n) {
  std::vector<std::vector<int>> all;
  std::vector<int> cur(n, -1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n && i < 8; ++i) total *= 3;
  if (n > 8) total = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      cur[n - 1 - i] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    auto first = std::find_if(cur.begin(), cur.end(), [](int v) { return v != 0; });
    if (first == cur.end() || *first < 0) continue;
    all.push_back(cur);
  }
  auto support = [](const std::vector<int>& v) { return std::count_if(v.begin(), v.end(), [](int x) { return x != 0; }); };
  std::stable_sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    if (support(a) != support(b)) return support(a) < support(b);
    return a > b;  // e1 = (1,0,..) before e2 = (0,1,..)
  });
  std::vector<RationalVector> out;
  for (const auto& v : all) {
    RationalVector r;
    for (int x : v) r.emplace_back(x);
    out.push_back(std::move(r));
  }
  if (n > 8)
    for (std::size_t i = 0; i < n; ++i) out.push_back(unit_vector(n, i));
  return out;
}

inline EllipticityVerdict exact_no(const OperatorSpec& a, const RationalVector& xi, std::string method) {
  EllipticityVerdict v;
  v.verdict = Ellipticity::No;
  v.method = std::move(method);
  v.witness_xi = xi;
  v.witness_xi_approx = to_double(xi);
  const Subspace ker = Subspace::kernel_of(a.symbol().eval(xi));
  v.kernel_vector = ker.basis().front();
  v.kernel_vector_approx = to_double(*v.kernel_vector);
  return v;
}

// Kernel pivot column of the canonical first basis vector; witnesses whose
// kernel reaches an earlier coordinate direction are preferred.
inline std::size_t kernel_pivot(const OperatorSpec& a, const RationalVector& xi) {
  const auto b = Subspace::kernel_of(a.symbol().eval(xi)).basis();
  const auto& v = b.front();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) return i;
  return v.size();
}

inline Eigen::MatrixXd eval_symbol(const NumericMatrixPolynomial& s, const std::vector<double>& xi) {
  Eigen::MatrixXd m(s.rows(), s.cols());
  std::vector<double> buf(s.rows() * s.cols());
  s.eval(xi, buf);
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) m(i, j) = buf[i * s.cols() + j];
  return m;
}

inline double det_gram(const NumericMatrixPolynomial& s, const std::vector<double>& xi) {
  const Eigen::MatrixXd a = eval_symbol(s, xi);
  return (a.transpose() * a).determinant();
}

// Radical inverse in base b.
inline double radical_inverse(std::size_t i, unsigned base) {
  double f = 1.0 / base, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f /= base;
  }
  return r;
}

inline double inverse_normal_cdf(double p) {
  // Acklam's rational approximation; relative error below 1.2e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double lo = 0.02425, hi = 1 - lo;
  if (p < lo) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > hi) {
    const double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// Quasi-uniform deterministic points on S^{n-1}: Halton points pushed through
// the Gaussian quantile and normalised.
inline std::vector<std::vector<double>> sphere_samples(std::size_t n, std::size_t count) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 1; pts.size() < count; ++i) {
    std::vector<double> x(n);
    double norm = 0;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = inverse_normal_cdf(radical_inverse(i, primes[k % 16] + (k / 16) * 2));
      norm += x[k] * x[k];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (auto& v : x) v /= norm;
    pts.push_back(std::move(x));
  }
  return pts;
}

inline void normalize(std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  s = std::sqrt(s);
  for (auto& v : x) v /= s;
}

// Shrinking coordinate-pattern search on the sphere.
inline std::vector<double> refine_minimum(const NumericMatrixPolynomial& s, std::vector<double> x) {
  const std::size_t n = x.size();
  double fx = det_gram(s, x);
  double step = 0.05;
  while (step > 1e-10) {
    bool improved = false;
    for (std::size_t k = 0; k < n; ++k)
      for (double dir : {1.0, -1.0}) {
        std::vector<double> y = x;
        y[k] += dir * step;
        normalize(y);
        const double fy = det_gram(s, y);
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  return x;
}

// Candidate rational points near an approximate zero: coordinates snapped to
// small-denominator fractions after scaling the largest coordinate to 1.
inline std::vector<RationalVector> rationalizations(const std::vector<double>& x) {
  std::vector<RationalVector> out;
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  for (long den : {1L, 2L, 3L, 4L, 5L, 6L, 8L, 10L, 12L, 16L, 100L}) {
    RationalVector r;
    bool nonzero = false;
    for (double v : x) {
      const long num = std::lround(v / m * den);
      r.push_back(Rational(num, den));
      nonzero |= num != 0;
    }
    for (auto& q : r) q.canonicalize();
    if (nonzero) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace elliptic_detail

// Decides whether A(xi) is injective for every xi != 0.
//
// Exact zeros of det A*A are first searched among the small directions
// {-1,0,1}^n. n = 1 is then decided exactly (det G = c xi^m), n = 2 exactly by
// Sturm counting on det G(1, t), and n >= 3 by sampled minimisation of det G
// over the unit sphere, returning NumericallyPositive or Inconclusive unless an
// exact rational zero is found.
inline EllipticityVerdict is_elliptic(const OperatorSpec& a, const EllipticityOptions& opt = {}) {
  using namespace elliptic_detail;
  if (!a.is_homogeneous()) throw Error(ErrorKind::NotHomogeneous, "ellipticity needs an operator of a single order");
  const std::size_t n = a.space_dim();
  const Polynomial det = det_adj(gram(a)).det;

  if (det.is_zero()) return exact_no(a, unit_vector(n, 0), "det A*A vanishes identically");

  {
    std::optional<RationalVector> best;
    std::size_t best_pivot = 0;
    for (const auto& xi : small_directions(n)) {
      if (det.eval(xi) != 0) continue;
      const std::size_t piv = kernel_pivot(a, xi);
      if (!best || piv < best_pivot) {
        best = xi;
        best_pivot = piv;
      }
    }
    if (best) return exact_no(a, *best, "exact zero of det A*A at a small direction");
  }

  EllipticityVerdict v;
  if (n == 1) {
    v.verdict = Ellipticity::Yes;
    v.method = "n = 1: det A*A is a nonzero multiple of a power of xi_1";
    return v;
  }

  if (n == 2) {
    // det G(1, t); the direction (0, 1) was already checked among the small directions.
    std::vector<Rational> coeffs(det.total_degree().value_or(0) + 1, Rational(0));
    for (const auto& [alpha, c] : det.terms()) coeffs[alpha[1]] += c;
    UnivariatePolynomial q(std::move(coeffs));
    if (count_real_roots(q) == 0) {
      v.verdict = Ellipticity::Yes;
      v.method = "n = 2: Sturm sequence of det A*A(1, t) has no real roots";
      return v;
    }
    const auto root = smallest_real_root(q);
    if (root->exact) return exact_no(a, RationalVector{Rational(1), root->value}, "n = 2: rational real root of det A*A(1, t)");
    v.verdict = Ellipticity::No;
    v.method = "n = 2: Sturm sequence of det A*A(1, t) certifies an irrational real root";
    v.witness_xi_approx = {1.0, root->value.get_d()};
    const Eigen::MatrixXd sym = eval_symbol(NumericMatrixPolynomial(a.symbol()), v.witness_xi_approx);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym, Eigen::ComputeFullV);
    const Eigen::VectorXd k = svd.matrixV().col(sym.cols() - 1);
    v.kernel_vector_approx.assign(k.data(), k.data() + k.size());
    return v;
  }

  const NumericMatrixPolynomial s(a.symbol());
  const auto pts = sphere_samples(n, opt.samples);
  std::vector<std::pair<double, std::size_t>> vals;
  vals.reserve(pts.size());
  double maxv = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = det_gram(s, pts[i]);
    vals.emplace_back(d, i);
    maxv = std::max(maxv, d);
  }
  std::sort(vals.begin(), vals.end());
  double minv = vals.front().first;
  std::vector<double> argmin = pts[vals.front().second];
  for (std::size_t r = 0; r < std::min(opt.refine_starts, vals.size()); ++r) {
    auto x = refine_minimum(s, pts[vals[r].second]);
    const double d = det_gram(s, x);
    if (d < minv) {
      minv = d;
      argmin = std::move(x);
    }
  }
  const double normalized = maxv > 0 ? minv / maxv : 0.0;
  v.normalized_min = normalized;
  if (normalized > opt.threshold) {
    v.verdict = Ellipticity::NumericallyPositive;
    v.method = "sampled minimum of det A*A over the unit sphere";
    return v;
  }
  for (const auto& cand : rationalizations(argmin))
    if (det.eval(cand) == 0) return exact_no(a, cand, "exact zero of det A*A near the sampled minimum");
  v.verdict = Ellipticity::Inconclusive;
  v.method = "sampled minimum of det A*A below threshold without an exact zero";
  v.witness_xi_approx = argmin;
  return v;
}

}  // namespace l1c
