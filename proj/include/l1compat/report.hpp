#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "l1compat/conditions.hpp"
#include "l1compat/ellipticity.hpp"
#include "l1compat/quadrature.hpp"

namespace l1c {

inline constexpr const char* kToolName = "l1compat";
inline constexpr const char* kVersion = "0.1.0";

// FNV-1a, 64 bit, as 16 lowercase hex digits.
inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ReportOptions {
  double weak_tol = 1e-8;
  std::uint64_t seed = 0;
  EllipticityOptions ellipticity;
  MomentOptions moment;
};

struct Diagnostic {
  std::string code;
  std::string message;
};

struct ConditionReport {
  std::string input_hash;
  ReportOptions options;
  std::size_t n = 0, dim_v = 0, dim_e = 0, dim_f = 0;
  unsigned order = 0;
  bool constrained = false;
  EllipticityVerdict elliptic;
  std::optional<Subspace> image_intersection;  // I_A, when A is elliptic
  Subspace kernel_intersection;                // K_C
  std::optional<bool> canceling;
  bool cocanceling = false;
  std::optional<CompatibilityResult> cc;
  std::optional<WeakCancellationResult> weak;
  std::optional<WeakCancellationResult> cwc;
  std::vector<Diagnostic> diagnostics;
  bool inconclusive = false;
};

// Runs every check on a system. Ellipticity failures and numerical trouble
// become diagnostics with the dependent verdicts left empty; structural
// errors (mixed orders in A, malformed input) are thrown.
inline ConditionReport check(const SystemSpec& sys, const ReportOptions& opt = {}, std::string_view source = {}) {
  ConditionReport r;
  r.input_hash = fnv1a64(source);
  r.options = opt;
  r.n = sys.n;
  r.dim_v = sys.A.source_dim();
  r.dim_e = sys.A.target_dim();
  r.constrained = sys.C.has_value();
  r.dim_f = sys.C ? sys.C->target_dim() : 0;
  r.order = sys.A.order();

  r.kernel_intersection = sys.C ? kernel_intersection(*sys.C) : Subspace::full(r.dim_e);
  r.cocanceling = r.kernel_intersection.is_zero();

  r.elliptic = is_elliptic(sys.A, opt.ellipticity);
  switch (r.elliptic.verdict) {
    case Ellipticity::No: {
      std::string where;
      if (r.elliptic.witness_xi && r.elliptic.kernel_vector)
        where = "A(xi) v = 0 for xi = " + to_string(*r.elliptic.witness_xi) + ", v = " + to_string(*r.elliptic.kernel_vector);
      else
        where = "A*A is singular near a sampled direction";
      r.diagnostics.push_back({"not_elliptic_hypothesis_violated",
                               "operator A is not elliptic (" + where +
                                   "); the L1 estimates presuppose ellipticity, so canceling, CC, weak cancellation and "
                                   "CWC are not decided"});
      return r;
    }
    case Ellipticity::Inconclusive:
      r.inconclusive = true;
      r.diagnostics.push_back({"ellipticity_inconclusive",
                               "sampled minimum of det A*A on the sphere is below the threshold without an exact zero"});
      return r;
    default:
      break;
  }

  try {
    r.cc = check_CC(sys);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotElliptic) throw;
    r.inconclusive = true;
    r.diagnostics.push_back({"annihilator_failed", e.what()});
    return r;
  }
  r.image_intersection = r.cc->image_intersection;
  r.canceling = r.image_intersection->is_zero();

  if (r.order < r.n) {
    r.diagnostics.push_back({"weak_not_applicable", "order k = " + std::to_string(r.order) + " is below n = " +
                                                        std::to_string(r.n) + "; weak cancellation and CWC need k >= n"});
    return r;
  }
  MomentOptions mopt = opt.moment;
  mopt.tol = opt.weak_tol;
  auto run = [&](const Subspace& s, const char* what) -> std::optional<WeakCancellationResult> {
    try {
      return check_weak_cancellation(sys.A, s, mopt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::QuadratureNotConverged && e.kind() != ErrorKind::NearSingularSymbol) throw;
      r.inconclusive = true;
      r.diagnostics.push_back({std::string(what) + "_undecided", e.what()});
      return std::nullopt;
    }
  };
  r.weak = run(*r.image_intersection, "weak");
  r.cwc = run(r.cc->common, "cwc");
  return r;
}

// 0 when every applicable verdict was decided, 2 when something is inconclusive.
inline int exit_code(const ConditionReport& r) { return r.inconclusive ? 2 : 0; }

namespace report_detail {

using nlohmann::ordered_json;

inline ordered_json vec_json(const RationalVector& v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

inline ordered_json basis_json(const Subspace& s) {
  ordered_json a = ordered_json::array();
  for (const auto& v : s.basis()) a.push_back(vec_json(v));
  return a;
}

inline ordered_json moment_map_json(const MomentMap& m) {
  ordered_json j;
  ordered_json gammas = ordered_json::array();
  for (std::size_t g = 0; g < m.gammas.size(); ++g)
    gammas.push_back({{"gamma", m.gammas[g].exponents()}, {"multiplicity", m.multiplicity[g]}});
  j["tensor_basis"] = gammas;
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.matrix.rows(); ++i) rows.push_back(m.matrix.row(i));
  j["matrix"] = rows;
  j["level"] = m.level;
  j["nodes"] = m.node_count;
  j["error_estimate"] = m.error_estimate;
  return j;
}

inline ordered_json weak_json(const std::optional<WeakCancellationResult>& w) {
  if (!w) return nullptr;
  ordered_json j;
  j["holds"] = w->holds;
  j["vacuous"] = w->vacuous;
  ordered_json ms = ordered_json::array();
  for (const auto& m : w->moments) ms.push_back({{"e", vec_json(m.e)}, {"norm", m.norm}, {"scale", m.scale}});
  j["moments"] = ms;
  j["moment_map"] = w->map ? moment_map_json(*w->map) : ordered_json(nullptr);
  return j;
}

}  // namespace report_detail

inline nlohmann::ordered_json to_json(const ConditionReport& r) {
  using report_detail::ordered_json;
  using namespace report_detail;
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["input_hash"] = r.input_hash;
  j["seed"] = r.options.seed;
  j["tolerances"] = {{"weak_tol", r.options.weak_tol},
                     {"ellipticity_threshold", r.options.ellipticity.threshold},
                     {"ellipticity_samples", r.options.ellipticity.samples}};
  j["system"] = {{"n", r.n},       {"dim_V", r.dim_v},        {"dim_E", r.dim_e},
                 {"dim_F", r.dim_f}, {"order", r.order}, {"constrained", r.constrained}};

  ordered_json el;
  el["verdict"] = to_string(r.elliptic.verdict);
  el["method"] = r.elliptic.method;
  el["witness_xi"] = r.elliptic.witness_xi ? vec_json(*r.elliptic.witness_xi) : ordered_json(nullptr);
  el["kernel_vector"] = r.elliptic.kernel_vector ? vec_json(*r.elliptic.kernel_vector) : ordered_json(nullptr);
  el["normalized_min"] = r.elliptic.normalized_min ? ordered_json(*r.elliptic.normalized_min) : ordered_json(nullptr);
  j["elliptic"] = el;

  j["I_A_basis"] = r.image_intersection ? basis_json(*r.image_intersection) : ordered_json(nullptr);
  j["K_C_basis"] = basis_json(r.kernel_intersection);
  j["canceling"] = r.canceling ? ordered_json(*r.canceling) : ordered_json(nullptr);
  j["cocanceling"] = r.cocanceling;
  if (r.cc)
    j["CC"] = {{"holds", r.cc->holds}, {"witness", r.cc->witness ? vec_json(*r.cc->witness) : ordered_json(nullptr)}};
  else
    j["CC"] = nullptr;
  j["weak"] = weak_json(r.weak);
  j["CWC"] = weak_json(r.cwc);
  ordered_json d = ordered_json::array();
  for (const auto& x : r.diagnostics) d.push_back({{"code", x.code}, {"message", x.message}});
  j["diagnostics"] = d;
  return j;
}

// Plain-text rendering for terminals.
inline std::string to_text(const ConditionReport& r) {
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + ": " + v + "\n"; };
  auto yn = [](bool b) { return std::string(b ? "yes" : "no"); };
  line("elliptic", std::string(to_string(r.elliptic.verdict)) + (r.elliptic.method.empty() ? "" : " (" + r.elliptic.method + ")"));
  if (r.elliptic.witness_xi) line("  witness xi", to_string(*r.elliptic.witness_xi));
  if (r.elliptic.kernel_vector) line("  kernel vector", to_string(*r.elliptic.kernel_vector));
  line("I_A", r.image_intersection ? to_string(*r.image_intersection) : "n/a");
  line("K_C", to_string(r.kernel_intersection));
  line("canceling", r.canceling ? yn(*r.canceling) : "n/a");
  line("cocanceling", yn(r.cocanceling));
  if (r.cc)
    line("CC", std::string(r.cc->holds ? "holds" : "fails") + (r.cc->witness ? " (witness " + to_string(*r.cc->witness) + ")" : ""));
  else
    line("CC", "n/a");
  auto weak = [&](const char* name, const std::optional<WeakCancellationResult>& w) {
    if (!w) return line(name, "n/a");
    line(name, std::string(w->holds ? "holds" : "fails") + (w->vacuous ? " (vacuous)" : ""));
    for (const auto& m : w->moments) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6e", m.norm);
      line(std::string("  |M_A e| for e = ") + to_string(m.e), buf);
    }
  };
  weak("weakly canceling", r.weak);
  weak("CWC", r.cwc);
  for (const auto& d : r.diagnostics) line("diagnostic [" + d.code + "]", d.message);
  return s;
}

}  // namespace l1c
