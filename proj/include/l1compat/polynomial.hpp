#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l1compat/multi_index.hpp"
#include "l1compat/rational.hpp"

namespace l1c {

// Sparse multivariate polynomial over Q in a fixed number of variables.
// Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, Rational, MonomialOrder>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(MultiIndex(nvars), c);
    return p;
  }
  static Polynomial monomial(const MultiIndex& alpha, const Rational& c = 1) {
    Polynomial p(alpha.size());
    p.add_term(alpha, c);
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t i) {
    return monomial(MultiIndex::unit(nvars, i));
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  Rational coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const MultiIndex& alpha, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  // Largest total degree of a stored term; nullopt for the zero polynomial.
  std::optional<unsigned> total_degree() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->first.degree();  // MonomialOrder puts the highest degree first
  }

  // Common degree of all terms, or nullopt if the polynomial is zero or mixes degrees.
  std::optional<unsigned> homogeneous_degree() const {
    if (terms_.empty()) return std::nullopt;
    const unsigned d = terms_.begin()->first.degree();
    if (terms_.rbegin()->first.degree() != d) return std::nullopt;
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (sgn(s) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  Polynomial operator-() const { return *this * Rational(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r(a.nvars_ ? a.nvars_ : b.nvars_);
    if (a.is_zero() || b.is_zero()) return r;
    Rational prod;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        prod = ca * cb;
        r.add_term(ea + eb, prod);
      }
    }
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  // Multiplication by the monomial xi^gamma.
  Polynomial shifted(const MultiIndex& gamma) const {
    Polynomial r(nvars_);
    for (const auto& [a, c] : terms_) r.terms_.emplace(a + gamma, c);
    return r;
  }

  // d^beta / dx^beta.
  Polynomial derivative(const MultiIndex& beta) const {
    Polynomial r(nvars_);
    for (const auto& [a, c] : terms_) {
      if (!a.divisible_by(beta)) continue;
      Rational f = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned j = 0; j < beta[i]; ++j) f *= a[i] - j;
      r.add_term(a - beta, f);
    }
    return r;
  }

  Polynomial pow(unsigned e) const {
    Polynomial r = constant(nvars_, 1);
    for (unsigned i = 0; i < e; ++i) r *= *this;
    return r;
  }

  Rational eval(std::span<const Rational> x) const {
    Rational s = 0, t;
    for (const auto& [a, c] : terms_) {
      t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned j = 0; j < a[i]; ++j) t *= x[i];
      s += t;
    }
    return s;
  }

  double eval(std::span<const double> x) const {
    double s = 0;
    for (const auto& [a, c] : terms_) {
      double t = c.get_d();
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned j = 0; j < a[i]; ++j) t *= x[i];
      s += t;
    }
    return s;
  }

  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

 private:
  std::size_t nvars_ = 0;
  TermMap terms_;
};

// Human-readable form using the given variable stem: "3/2 x1^2 x2 - x3".
inline std::string to_string(const Polynomial& p, const std::string& var = "x") {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [a, c] : p.terms()) {
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) out += "-";
    } else {
      out += sgn(c) < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      if (!mono.empty()) mono += " ";
      mono += var + std::to_string(i + 1);
      if (a[i] > 1) mono += "^" + std::to_string(a[i]);
    }
    if (mono.empty()) {
      out += to_string(mag);
    } else {
      if (mag != 1) out += to_string(mag) + " ";
      out += mono;
    }
  }
  return out;
}

}  // namespace l1c
