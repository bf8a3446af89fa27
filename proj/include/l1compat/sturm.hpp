#pragma once

#include <optional>
#include <vector>

#include "l1compat/rational.hpp"

namespace l1c {

// Dense univariate polynomial over Q, coefficients from degree 0 upward.
class UnivariatePolynomial {
 public:
  UnivariatePolynomial() = default;
  explicit UnivariatePolynomial(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

  bool is_zero() const noexcept { return c_.empty(); }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const Rational& leading() const { return c_.back(); }
  const std::vector<Rational>& coefficients() const noexcept { return c_; }

  Rational eval(const Rational& t) const {
    Rational s = 0;
    for (std::size_t i = c_.size(); i-- > 0;) s = s * t + c_[i];
    return s;
  }

  UnivariatePolynomial derivative() const {
    std::vector<Rational> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<unsigned long>(i));
    return UnivariatePolynomial(std::move(d));
  }

  // Remainder of division by a nonzero divisor.
  UnivariatePolynomial rem(const UnivariatePolynomial& d) const {
    std::vector<Rational> r = c_;
    const std::size_t dd = d.c_.size() - 1;
    Rational f;
    while (r.size() > dd && !r.empty()) {
      f = r.back() / d.c_.back();
      const std::size_t shift = r.size() - 1 - dd;
      for (std::size_t i = 0; i <= dd; ++i) r[shift + i] -= f * d.c_[i];
      r.pop_back();
      while (!r.empty() && sgn(r.back()) == 0) r.pop_back();
    }
    return UnivariatePolynomial(std::move(r));
  }

  UnivariatePolynomial operator-() const {
    std::vector<Rational> c = c_;
    for (auto& x : c) x = -x;
    return UnivariatePolynomial(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// Sturm sequence p0 = p, p1 = p', p_{i+1} = -rem(p_{i-1}, p_i).
inline std::vector<UnivariatePolynomial> sturm_sequence(const UnivariatePolynomial& p) {
  std::vector<UnivariatePolynomial> seq;
  if (p.is_zero()) return seq;
  seq.push_back(p);
  UnivariatePolynomial d = p.derivative();
  while (!d.is_zero()) {
    seq.push_back(d);
    d = -seq[seq.size() - 2].rem(seq.back());
  }
  return seq;
}

namespace sturm_detail {

inline int sign_changes(const std::vector<int>& signs) {
  int changes = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline int changes_at(const std::vector<UnivariatePolynomial>& seq, const Rational& t) {
  std::vector<int> s;
  for (const auto& q : seq) s.push_back(sgn(q.eval(t)));
  return sign_changes(s);
}

inline int changes_at_infinity(const std::vector<UnivariatePolynomial>& seq, bool positive) {
  std::vector<int> s;
  for (const auto& q : seq) {
    int sg = sgn(q.leading());
    if (!positive && q.degree() % 2) sg = -sg;
    s.push_back(sg);
  }
  return sign_changes(s);
}

}  // namespace sturm_detail

// Number of distinct real roots.
inline int count_real_roots(const UnivariatePolynomial& p) {
  if (p.degree() <= 0) return 0;
  const auto seq = sturm_sequence(p);
  return sturm_detail::changes_at_infinity(seq, false) - sturm_detail::changes_at_infinity(seq, true);
}

// Number of distinct real roots in (a, b], a < b.
inline int count_real_roots(const UnivariatePolynomial& p, const Rational& a, const Rational& b) {
  if (p.degree() <= 0) return 0;
  const auto seq = sturm_sequence(p);
  return sturm_detail::changes_at(seq, a) - sturm_detail::changes_at(seq, b);
}

// Cauchy bound: every real root lies in [-B, B].
inline Rational root_bound(const UnivariatePolynomial& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, Rational(abs(p.coefficients()[i] / p.leading())));
  return m + 1;
}

// Smallest real root, located by Sturm bisection. Returns an exact rational
// root when one with small denominator exists near it (checked exactly),
// otherwise the midpoint of an isolating interval of width <= width.
struct RootLocation {
  Rational value;
  bool exact = false;
};

inline std::optional<RootLocation> smallest_real_root(const UnivariatePolynomial& p, const Rational& width = Rational(1, 1 << 30)) {
  if (count_real_roots(p) == 0) return std::nullopt;
  const auto seq = sturm_sequence(p);
  Rational lo = -root_bound(p), hi = root_bound(p);
  auto roots_in = [&](const Rational& a, const Rational& b) {
    return sturm_detail::changes_at(seq, a) - sturm_detail::changes_at(seq, b);
  };
  if (p.eval(lo) == 0) return RootLocation{lo, true};
  while (hi - lo > width) {
    Rational mid = (lo + hi) / 2;
    if (roots_in(lo, mid) > 0) hi = mid;
    else lo = mid;
  }
  if (p.eval(hi) == 0) return RootLocation{hi, true};
  // Try small-denominator rationals in the interval via continued fractions of the midpoint.
  const Rational mid = (lo + hi) / 2;
  Rational x = mid;
  std::vector<mpz_class> cf;
  for (int it = 0; it < 24; ++it) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    cf.push_back(a);
    // convergent
    Rational conv = Rational(cf.back());
    for (std::size_t k = cf.size() - 1; k-- > 0;) conv = Rational(cf[k]) + 1 / conv;
    if (conv > lo - width && conv < hi + width && p.eval(conv) == 0) return RootLocation{conv, true};
    Rational frac = x - Rational(a);
    if (sgn(frac) == 0) break;
    x = 1 / frac;
  }
  return RootLocation{mid, false};
}

}  // namespace l1c
