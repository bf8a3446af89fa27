#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "l1compat/rational.hpp"

namespace l1c {

// Exponent vector alpha of a monomial xi^alpha in n variables.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : e_(n, 0) {}
  MultiIndex(std::initializer_list<unsigned> e) : e_(e) {}
  explicit MultiIndex(std::vector<unsigned> e) : e_(std::move(e)) {}

  static MultiIndex unit(std::size_t n, std::size_t i, unsigned power = 1) {
    MultiIndex m(n);
    m.e_[i] = power;
    return m;
  }

  std::size_t size() const noexcept { return e_.size(); }
  unsigned degree() const noexcept { return std::accumulate(e_.begin(), e_.end(), 0u); }
  unsigned operator[](std::size_t i) const { return e_[i]; }
  unsigned& operator[](std::size_t i) { return e_[i]; }
  const std::vector<unsigned>& exponents() const noexcept { return e_; }

  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
  }

  // Componentwise o <= *this.
  bool divisible_by(const MultiIndex& o) const {
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (o.e_[i] > e_[i]) return false;
    return true;
  }

  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
  }

  // alpha! = prod alpha_i!
  Rational factorial() const {
    mpz_class f = 1;
    for (unsigned a : e_)
      for (unsigned j = 2; j <= a; ++j) f *= j;
    return Rational(f);
  }

  // |alpha|! / alpha!: the number of index tuples (i_1..i_d) whose monomial is xi^alpha.
  std::uint64_t multinomial() const {
    std::uint64_t r = 1;
    unsigned acc = 0;
    for (unsigned a : e_) {
      for (unsigned j = 1; j <= a; ++j) {
        ++acc;
        r = r * acc / j;
      }
    }
    return r;
  }

  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<unsigned> e_;
};

// Graded order with higher degree first and, within a degree, lexicographically
// larger exponent vectors first, so d1^2 precedes d1 d2 precedes d2^2. Every
// container keyed by MultiIndex uses this order, which fixes printing order.
struct MonomialOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const unsigned da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    return a.exponents() > b.exponents();
  }
};

// All multi-indices in n variables of total degree d, in MonomialOrder.
inline std::vector<MultiIndex> multi_indices_of_degree(std::size_t n, unsigned d) {
  std::vector<MultiIndex> out;
  if (n == 0) {
    if (d == 0) out.emplace_back(0);
    return out;
  }
  MultiIndex cur(n);
  // Recursive fill: first coordinate takes the largest share first.
  auto rec = [&](auto&& self, std::size_t pos, unsigned left) -> void {
    if (pos + 1 == n) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned a = left + 1; a-- > 0;) {
      cur[pos] = a;
      self(self, pos + 1, left - a);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, d);
  return out;
}

}  // namespace l1c
