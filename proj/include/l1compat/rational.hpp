#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

#include "l1compat/error.hpp"

namespace l1c {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

inline Rational parse_rational(std::string_view text) {
  Rational q;
  if (text.empty() || q.set_str(std::string(text), 10) != 0)
    throw Error(ErrorKind::Syntax, "malformed rational '" + std::string(text) + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::Syntax, "zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

inline std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_d());
  return out;
}

inline bool is_zero(const RationalVector& v) {
  for (const auto& q : v)
    if (sgn(q) != 0) return false;
  return true;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RationalVector unit_vector(std::size_t dim, std::size_t i) {
  RationalVector v(dim, Rational(0));
  v[i] = 1;
  return v;
}

}  // namespace l1c
