#pragma once

// Text format for operators and systems.
//
//   # comment
//   dim 3
//   operator A {
//     from 3 to 4
//     rows: d1 u1 + d2 u2 + d3 u3;
//           d2 u3 - d3 u2
//           d3 u1 - d1 u3; d1 u2 - d2 u1
//   }
//   constraint C {
//     from 4 to 1
//     rows: d1 f1 + d2 f2 + d3 f3
//   }
//
// Rows are separated by ';' or by a newline that follows a complete row. A term
// is an optional rational coefficient (integer or a/b), a product of
// derivative monomials d_i^p and parenthesised polynomials in the d_i, and a
// component f_j or u_j. A row consisting of the single token 0 is the zero row.

#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "l1compat/operator.hpp"

namespace l1c {

namespace dsl_detail {

enum class Tok { Int, Ident, LBrace, RBrace, LParen, RParen, Semi, Colon, Plus, Minus, Caret, Star, Slash, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '\n') {
      out.push_back({Tok::Newline, "\n", line});
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), line});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), line});
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '^': k = Tok::Caret; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      default:
        throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", line);
    }
    out.push_back({k, std::string(1, c), line});
    ++i;
  }
  out.push_back({Tok::End, "", line});
  return out;
}

// One lexical atom inside a row: a derivative d_i or a component f_j / u_j.
struct Atom {
  char letter;
  unsigned index;
};

// Identifiers like "d1d2" are split into atoms; anything else is not a row atom.
inline std::optional<std::vector<Atom>> split_atoms(const std::string& ident) {
  static const std::regex whole("^([dfu][0-9]+)+$");
  if (!std::regex_match(ident, whole)) return std::nullopt;
  std::vector<Atom> atoms;
  std::size_t i = 0;
  while (i < ident.size()) {
    const char letter = ident[i++];
    std::size_t j = i;
    while (j < ident.size() && std::isdigit(static_cast<unsigned char>(ident[j]))) ++j;
    atoms.push_back({letter, static_cast<unsigned>(std::stoul(ident.substr(i, j - i)))});
    i = j;
  }
  return atoms;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::size_t begin, std::size_t end)
      : toks_(std::move(toks)), pos_(begin), end_(end) {}

  struct RowsResult {
    std::vector<std::vector<Polynomial>> rows;  // rows[r][component]
    std::vector<int> lines;
    unsigned max_component = 0;
    char letter = 0;
  };

  // Parses "rows:" followed by rows until '}' or the end of the range.
  RowsResult parse_rows(std::size_t n, std::optional<std::size_t> declared_source) {
    n_ = n;
    declared_source_ = declared_source;
    letter_ = 0;
    max_component_ = 0;
    expect_ident("rows");
    expect(Tok::Colon, "':' after rows");
    RowsResult res;
    skip_newlines();
    while (true) {
      const int line = peek().line;
      auto row = parse_row(res);
      check_row_homogeneous(row, line);
      res.rows.push_back(std::move(row));
      res.lines.push_back(line);
      // separators
      bool had_sep = false;
      while (peek().kind == Tok::Semi || peek().kind == Tok::Newline) {
        next();
        had_sep = true;
      }
      if (at_end() || peek().kind == Tok::RBrace) break;
      if (!had_sep) throw Error(ErrorKind::Syntax, "expected ';' or newline between rows, got '" + peek().text + "'", peek().line);
    }
    res.letter = letter_ ? letter_ : 'f';
    res.max_component = max_component_;
    return res;
  }

  const Token& peek() const { return pos_ < end_ ? toks_[pos_] : toks_[end_ < toks_.size() ? end_ : toks_.size() - 1]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_end() const { return pos_ >= end_ || toks_[pos_].kind == Tok::End; }
  std::size_t pos() const { return pos_; }

  void skip_newlines() {
    while (!at_end() && peek().kind == Tok::Newline) next();
  }

  void expect(Tok k, const std::string& what) {
    skip_newlines_if(k != Tok::Newline);
    if (at_end() || peek().kind != k) throw Error(ErrorKind::Syntax, "expected " + what + ", got '" + peek().text + "'", peek().line);
    next();
  }
  void expect_ident(const std::string& word) {
    skip_newlines();
    if (at_end() || peek().kind != Tok::Ident || peek().text != word)
      throw Error(ErrorKind::Syntax, "expected '" + word + "', got '" + peek().text + "'", peek().line);
    next();
  }
  unsigned expect_int(const std::string& what) {
    skip_newlines();
    if (at_end() || peek().kind != Tok::Int) throw Error(ErrorKind::Syntax, "expected " + what + ", got '" + peek().text + "'", peek().line);
    return static_cast<unsigned>(std::stoul(next().text));
  }

 private:
  void skip_newlines_if(bool b) {
    if (b) skip_newlines();
  }

  std::vector<Polynomial> empty_row() const {
    std::size_t width = declared_source_ ? *declared_source_ : 0;
    return std::vector<Polynomial>(width, Polynomial(n_));
  }

  void place(std::vector<Polynomial>& row, unsigned comp, const Polynomial& p) {
    if (row.size() < comp) row.resize(comp, Polynomial(n_));
    row[comp - 1] += p;
  }

  Rational parse_coefficient() {
    Rational q = parse_rational(next().text);
    if (!at_end() && peek().kind == Tok::Slash) {
      next();
      if (at_end() || peek().kind != Tok::Int) throw Error(ErrorKind::Syntax, "expected denominator", peek().line);
      const Rational den = parse_rational(next().text);
      if (den == 0) throw Error(ErrorKind::Syntax, "zero denominator", peek().line);
      q /= den;
    }
    return q;
  }

  unsigned parse_power() {
    if (!at_end() && peek().kind == Tok::Caret) {
      next();
      if (at_end() || peek().kind != Tok::Int) throw Error(ErrorKind::Syntax, "expected exponent after '^'", peek().line);
      return static_cast<unsigned>(std::stoul(next().text));
    }
    return 1;
  }

  // Zero-based variable of the token d_idx.
  std::size_t derivative_var(unsigned idx, int line) const {
    if (idx == 0 || idx > n_)
      throw Error(ErrorKind::Syntax, "derivative d" + std::to_string(idx) + " outside dimension " + std::to_string(n_), line);
    return idx - 1;
  }

  // Polynomial in the d_i inside parentheses, optionally raised to a power.
  Polynomial parse_paren_poly() {
    const int open_line = peek().line;
    next();  // (
    Polynomial acc(n_);
    bool first = true;
    while (true) {
      skip_newlines();
      if (at_end()) throw Error(ErrorKind::Syntax, "unterminated '('", open_line);
      if (peek().kind == Tok::RParen) {
        if (first) throw Error(ErrorKind::Syntax, "empty parentheses", peek().line);
        next();
        break;
      }
      Rational sign = 1;
      if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
        if (peek().kind == Tok::Minus) sign = -1;
        next();
        skip_newlines();
      } else if (!first) {
        throw Error(ErrorKind::Syntax, "expected '+' or '-' inside parentheses, got '" + peek().text + "'", peek().line);
      }
      first = false;
      Rational coef = 1;
      bool any = false;
      if (peek().kind == Tok::Int) {
        coef = parse_coefficient();
        any = true;
        if (peek().kind == Tok::Star) next();
      }
      MultiIndex mono(n_);
      while (!at_end() && peek().kind == Tok::Ident) {
        const Token t = peek();
        auto atoms = split_atoms(t.text);
        if (!atoms) throw Error(ErrorKind::Syntax, "unexpected '" + t.text + "' in polynomial", t.line);
        for (const auto& a : *atoms)
          if (a.letter != 'd') throw Error(ErrorKind::Syntax, "component inside parentheses", t.line);
        next();
        const unsigned p = parse_power();
        for (std::size_t k = 0; k < atoms->size(); ++k) {
          const unsigned power = k + 1 == atoms->size() ? p : 1;
          mono = mono + MultiIndex::unit(n_, derivative_var((*atoms)[k].index, t.line), power);
        }
        any = true;
        if (peek().kind == Tok::Star) next();
      }
      if (!any) throw Error(ErrorKind::Syntax, "expected a term inside parentheses, got '" + peek().text + "'", peek().line);
      acc.add_term(mono, sign * coef);
    }
    return acc.pow(parse_power());
  }

  std::vector<Polynomial> parse_row(RowsResult&) {
    std::vector<Polynomial> row = empty_row();
    skip_newlines();
    const int row_line = peek().line;
    // literal zero row
    if (peek().kind == Tok::Int && peek().text == "0" && pos_ + 1 <= end_) {
      const Tok after = pos_ + 1 < end_ ? toks_[pos_ + 1].kind : Tok::End;
      if (after == Tok::Semi || after == Tok::Newline || after == Tok::RBrace || after == Tok::End) {
        next();
        return row;
      }
    }
    bool first = true;
    while (true) {
      Rational sign = 1;
      if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
        if (peek().kind == Tok::Minus) sign = -1;
        next();
        skip_newlines();
      } else if (!first) {
        break;
      }
      first = false;
      Polynomial factor = Polynomial::constant(n_, sign);
      bool have_comp = false, have_factor = false;
      while (!at_end() && !have_comp) {
        const Token t = peek();
        if (t.kind == Tok::Int) {
          factor *= parse_coefficient();
          have_factor = true;
        } else if (t.kind == Tok::LParen) {
          factor *= parse_paren_poly();
          have_factor = true;
        } else if (t.kind == Tok::Star) {
          if (!have_factor) throw Error(ErrorKind::Syntax, "unexpected '*'", t.line);
          next();
          have_factor = false;
          continue;
        } else if (t.kind == Tok::Ident) {
          auto atoms = split_atoms(t.text);
          if (!atoms) throw Error(ErrorKind::Syntax, "unexpected identifier '" + t.text + "'", t.line);
          next();
          const unsigned p = parse_power();
          for (std::size_t k = 0; k < atoms->size(); ++k) {
            const Atom& a = (*atoms)[k];
            const bool last = k + 1 == atoms->size();
            if (a.letter == 'd') {
              factor = factor.shifted(MultiIndex::unit(n_, derivative_var(a.index, t.line), last ? p : 1));
              have_factor = true;
            } else {
              if (!last) throw Error(ErrorKind::Syntax, "component must end a term", t.line);
              if (p != 1) throw Error(ErrorKind::Syntax, "a component cannot be raised to a power", t.line);
              use_component(a, t.line);
              place(row, a.index, factor);
              have_comp = true;
            }
          }
        } else {
          break;
        }
      }
      if (!have_comp) {
        throw Error(ErrorKind::Syntax, "term without a component (expected f_j or u_j), got '" + peek().text + "'",
                    at_end() ? row_line : peek().line);
      }
    }
    return row;
  }

  void use_component(const Atom& a, int line) {
    if (a.index == 0) throw Error(ErrorKind::UnknownComponent, std::string(1, a.letter) + "0 is not a component", line);
    if (declared_source_ && a.index > *declared_source_)
      throw Error(ErrorKind::UnknownComponent,
                  std::string(1, a.letter) + std::to_string(a.index) + " exceeds declared dimension " + std::to_string(*declared_source_), line);
    if (letter_ && letter_ != a.letter)
      throw Error(ErrorKind::Syntax, "operator mixes component letters '" + std::string(1, letter_) + "' and '" + std::string(1, a.letter) + "'", line);
    if (!letter_) letter_ = a.letter;
    max_component_ = std::max(max_component_, a.index);
  }

  static void check_row_homogeneous(const std::vector<Polynomial>& row, int line) {
    std::optional<unsigned> d;
    for (const auto& p : row)
      for (const auto& [a, c] : p.terms()) {
        if (d && *d != a.degree())
          throw Error(ErrorKind::NonHomogeneousRow, "row mixes derivative orders " + std::to_string(*d) + " and " + std::to_string(a.degree()), line);
        d = a.degree();
      }
  }

  std::vector<Token> toks_;
  std::size_t pos_, end_;
  std::size_t n_ = 0;
  std::optional<std::size_t> declared_source_;
  char letter_ = 0;
  unsigned max_component_ = 0;
};

inline OperatorSpec build_operator(const Parser::RowsResult& rows, std::size_t n, std::size_t source, std::size_t target) {
  MatrixPolynomial s(target, source, n);
  for (std::size_t r = 0; r < rows.rows.size(); ++r)
    for (std::size_t i = 0; i < rows.rows[r].size(); ++i) s(r, i) = rows.rows[r][i];
  return OperatorSpec(std::move(s), rows.letter);
}

// Body of an operator/constraint block, positioned after '{'. Without a
// "from S to T" signature the source dimension is the largest component index
// and the target dimension is the number of rows.
inline OperatorSpec parse_block_body(Parser& p, std::size_t n, const std::string& name, int block_line) {
  p.skip_newlines();
  if (!(p.peek().kind == Tok::Ident && p.peek().text == "from")) {
    auto rows = p.parse_rows(n, std::nullopt);
    const std::size_t source = std::max<std::size_t>(rows.max_component, 1);
    return build_operator(rows, n, source, rows.rows.size());
  }
  p.expect_ident("from");
  const unsigned source = p.expect_int("source dimension");
  p.expect_ident("to");
  const unsigned target = p.expect_int("target dimension");
  if (source == 0) throw Error(ErrorKind::DimensionMismatch, "block '" + name + "' has zero source dimension", block_line);
  auto rows = p.parse_rows(n, source);
  if (rows.rows.size() != target)
    throw Error(ErrorKind::DimensionMismatch,
                "block '" + name + "' declares " + std::to_string(target) + " rows but lists " + std::to_string(rows.rows.size()),
                block_line);
  return build_operator(rows, n, source, target);
}

}  // namespace dsl_detail

// Parses a bare operator: optional "from S to T" followed by "rows: ...".
inline OperatorSpec parse_operator(std::string_view text, std::size_t n) {
  using namespace dsl_detail;
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "spatial dimension must be positive");
  auto toks = lex(text);
  const std::size_t end = toks.size() - 1;
  Parser p(toks, 0, end);
  p.skip_newlines();
  if (p.at_end()) throw Error(ErrorKind::Syntax, "empty operator text");
  OperatorSpec op = parse_block_body(p, n, "operator", p.peek().line);
  p.skip_newlines();
  if (!p.at_end()) throw Error(ErrorKind::Syntax, "trailing input '" + p.peek().text + "'", p.peek().line);
  return op;
}

inline SystemSpec parse_system(std::string_view text) {
  using namespace dsl_detail;
  auto toks = lex(text);
  const std::size_t end = toks.size() - 1;

  // The dimension is needed to parse rows, so find it first.
  std::optional<unsigned> n;
  int depth = 0;
  for (std::size_t i = 0; i < end; ++i) {
    if (toks[i].kind == Tok::LBrace) ++depth;
    if (toks[i].kind == Tok::RBrace) --depth;
    if (depth == 0 && toks[i].kind == Tok::Ident && toks[i].text == "dim") {
      if (n) throw Error(ErrorKind::DuplicateBlock, "dimension declared twice", toks[i].line);
      if (i + 1 >= end || toks[i + 1].kind != Tok::Int) throw Error(ErrorKind::Syntax, "expected integer after 'dim'", toks[i].line);
      n = static_cast<unsigned>(std::stoul(toks[i + 1].text));
      if (*n == 0) throw Error(ErrorKind::Syntax, "dimension must be positive", toks[i].line);
    }
  }
  if (!n) throw Error(ErrorKind::Syntax, "missing 'dim' declaration");

  SystemSpec sys;
  sys.n = *n;
  bool have_operator = false;
  int constraint_line = 0;
  Parser p(toks, 0, end);
  while (true) {
    p.skip_newlines();
    if (p.at_end()) break;
    const Token t = p.next();
    if (t.kind != Tok::Ident) throw Error(ErrorKind::Syntax, "expected a declaration, got '" + t.text + "'", t.line);
    if (t.text == "dim") {
      p.next();
      continue;
    }
    if (t.text != "operator" && t.text != "constraint")
      throw Error(ErrorKind::Syntax, "unknown declaration '" + t.text + "'", t.line);
    p.skip_newlines();
    if (p.at_end() || p.peek().kind != Tok::Ident) throw Error(ErrorKind::Syntax, "expected a block name", t.line);
    const std::string name = p.next().text;
    p.expect(Tok::LBrace, "'{'");
    OperatorSpec op = parse_block_body(p, *n, name, t.line);
    p.expect(Tok::RBrace, "'}'");
    if (t.text == "operator") {
      if (have_operator) throw Error(ErrorKind::DuplicateBlock, "second operator block '" + name + "'", t.line);
      have_operator = true;
      sys.operator_name = name;
      sys.A = std::move(op);
    } else {
      if (sys.C) throw Error(ErrorKind::DuplicateBlock, "second constraint block '" + name + "'", t.line);
      sys.constraint_name = name;
      sys.C = std::move(op);
      constraint_line = t.line;
    }
  }
  if (!have_operator) throw Error(ErrorKind::Syntax, "missing 'operator' block");
  if (sys.C && sys.C->source_dim() != sys.A.target_dim())
    throw Error(ErrorKind::DimensionMismatch,
                "constraint acts on R^" + std::to_string(sys.C->source_dim()) + " but the operator maps into R^" +
                    std::to_string(sys.A.target_dim()),
                constraint_line);
  return sys;
}

// ---- printing ---------------------------------------------------------------

namespace dsl_detail {

inline std::string monomial_text(const MultiIndex& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (!s.empty()) s += " ";
    s += "d" + std::to_string(i + 1);
    if (a[i] > 1) s += "^" + std::to_string(a[i]);
  }
  return s;
}

inline std::string row_text(const OperatorSpec& op, std::size_t r) {
  std::string out;
  bool first = true;
  for (std::size_t i = 0; i < op.source_dim(); ++i) {
    const Polynomial& p = op.symbol()(r, i);
    if (p.is_zero()) continue;
    const std::string comp = std::string(1, op.component()) + std::to_string(i + 1);
    if (p.term_count() == 1) {
      const auto& [a, c] = *p.terms().begin();
      const Rational mag = abs(c);
      out += first ? (sgn(c) < 0 ? "-" : "") : (sgn(c) < 0 ? " - " : " + ");
      const std::string mono = monomial_text(a);
      if (mag != 1) out += to_string(mag) + " ";
      if (!mono.empty()) out += mono + " ";
      out += comp;
    } else {
      if (!first) out += " + ";
      out += "(" + to_string(p, "d") + ") " + comp;
    }
    first = false;
  }
  return first ? "0" : out;
}

}  // namespace dsl_detail

// "from S to T" and the rows, one per line, in the format parse_operator reads.
inline std::string to_dsl(const OperatorSpec& op, const std::string& indent = "") {
  std::string out = indent + "from " + std::to_string(op.source_dim()) + " to " + std::to_string(op.target_dim()) + "\n";
  out += indent + "rows:\n";
  for (std::size_t r = 0; r < op.target_dim(); ++r) {
    out += indent + "  " + dsl_detail::row_text(op, r);
    out += r + 1 < op.target_dim() ? ";\n" : "\n";
  }
  return out;
}

inline std::string to_dsl(const SystemSpec& sys) {
  std::string out = "dim " + std::to_string(sys.n) + "\n";
  out += "operator " + sys.operator_name + " {\n" + to_dsl(sys.A, "  ") + "}\n";
  if (sys.C) out += "constraint " + (sys.constraint_name.empty() ? std::string("C") : sys.constraint_name) + " {\n" + to_dsl(*sys.C, "  ") + "}\n";
  return out;
}

}  // namespace l1c
