#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "l1compat/dsl.hpp"
#include "l1compat/report.hpp"
#include "l1compat/witness.hpp"

namespace {

using namespace l1c;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + out + "'");
  f << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& p : split(s, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size()) throw Error(ErrorKind::InvalidArgument, "not a number: '" + p + "'");
    v.push_back(x);
  }
  return v;
}

RationalVector parse_vector(const std::string& s) {
  RationalVector v;
  for (const auto& p : split(s, ',')) v.push_back(parse_rational(p));
  return v;
}

std::string system_text(const std::string& name, const OperatorSpec& op) {
  return "dim " + std::to_string(op.space_dim()) + "\n" + "operator " + name + " {\n" + to_dsl(op, "  ") + "}\n";
}

struct Common {
  std::string file;
  bool json = false;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string out;
};

int run_check(const Common& c, std::size_t samples) {
  const std::string src = read_file(c.file);
  const SystemSpec sys = parse_system(src);
  ReportOptions opt;
  opt.weak_tol = c.tol;
  opt.seed = c.seed;
  opt.ellipticity.samples = samples;
  const ConditionReport r = check(sys, opt, src);
  emit(c.json ? to_json(r).dump(2) + "\n" : to_text(r), c.out);
  return exit_code(r);
}

// Reports a non-elliptic operator with its witness and fails.
void require_elliptic(const OperatorSpec& a) {
  const auto v = is_elliptic(a);
  if (v.verdict == Ellipticity::No) {
    std::string msg = "operator is not elliptic";
    if (v.witness_xi && v.kernel_vector)
      msg += ": A(xi) v = 0 for xi = " + to_string(*v.witness_xi) + ", v = " + to_string(*v.kernel_vector);
    throw Error(ErrorKind::NotElliptic, msg);
  }
  if (v.verdict == Ellipticity::Inconclusive) throw Error(ErrorKind::NotElliptic, "ellipticity could not be decided");
}

int run_annihilator(const Common& c) {
  const SystemSpec sys = parse_system(read_file(c.file));
  require_elliptic(sys.A);
  const OperatorSpec l = annihilator(sys.A);
  std::string text;
  if (l.symbol().is_zero()) text += "# not canceling: annihilator trivial\n";
  text += system_text("L", l);
  emit(text, c.out);
  return 0;
}

int run_homogenize(const Common& c) {
  const SystemSpec sys = parse_system(read_file(c.file));
  const OperatorSpec& op = sys.C ? *sys.C : sys.A;
  emit(system_text(sys.C ? sys.constraint_name : sys.operator_name, homogenize(op)), c.out);
  return 0;
}

int run_moment(const Common& c) {
  const std::string src = read_file(c.file);
  const SystemSpec sys = parse_system(src);
  require_elliptic(sys.A);
  MomentOptions mo;
  mo.tol = c.tol;
  const MomentMap m = moment_map_converged(sys.A, mo);
  if (c.json) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["input_hash"] = fnv1a64(src);
    j["seed"] = c.seed;
    j["tolerances"] = {{"tol", c.tol}};
    j["moment_map"] = report_detail::moment_map_json(m);
    emit(j.dump(2) + "\n", c.out);
    return 0;
  }
  std::ostringstream os;
  os.precision(12);
  os << "# M_A : R^" << m.dim_e << " -> V (x) Sym^" << (m.order - m.n) << "(R^" << m.n << "), level " << m.level << ", "
     << m.node_count << " nodes, error estimate " << m.error_estimate << "\n";
  for (std::size_t i = 0; i < m.matrix.rows(); ++i) {
    const std::size_t v = i / m.gammas.size(), g = i % m.gammas.size();
    os << "v" << (v + 1) << " gamma(";
    for (std::size_t k = 0; k < m.n; ++k) os << (k ? "," : "") << m.gammas[g][k];
    os << ")";
    for (std::size_t j = 0; j < m.matrix.cols(); ++j) os << " " << m.matrix(i, j);
    os << "\n";
  }
  emit(os.str(), c.out);
  return 0;
}

struct WitnessFlags {
  std::string grid = "256";
  std::string eps = "0.4,0.2,0.1,0.05";
  std::string j = "inf";
  std::string dir;
  std::string mode = "dirac";
  bool lenient = false;
};

int run_witness(const Common& c, const WitnessFlags& w) {
  const std::string src = read_file(c.file);
  WitnessConfig cfg;
  cfg.system = parse_system(src);
  cfg.seed = c.seed;
  cfg.residual_tol = c.tol;
  cfg.strict = !w.lenient;
  try {
    cfg.grid_size = std::stoul(w.grid);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad grid size '" + w.grid + "'");
  }
  cfg.epsilons = parse_doubles(w.eps);
  if (w.j != "inf") {
    try {
      cfg.j = static_cast<unsigned>(std::stoul(w.j));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--j takes an integer or 'inf'");
    }
  }
  if (w.mode == "random") {
    cfg.mode = WitnessMode::Random;
  } else if (w.mode == "dirac") {
    if (w.dir.empty()) throw Error(ErrorKind::InvalidArgument, "dirac mode needs --dir");
    cfg.direction = parse_vector(w.dir);
  } else {
    throw Error(ErrorKind::InvalidArgument, "--mode takes dirac or random");
  }
  const WitnessResult r = blowup_experiment(cfg);
  if (c.json) {
    if (!c.out.empty()) emit(to_csv(r), c.out);
    std::cout << to_json(r, cfg, src).dump(2) << "\n";
  } else {
    emit(to_csv(r), c.out);
    std::cerr << "classification: " << to_string(r.classification) << ", slope " << r.slope << ", r2 " << r.r2 << "\n";
    for (const auto& d : r.diagnostics) std::cerr << "diagnostic [" << d.code << "]: " << d.message << "\n";
  }
  return r.classification == Growth::Indeterminate ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatibility conditions and L1 estimates for constant-coefficient differential operators"};
  app.require_subcommand(1);
  Common common;
  std::size_t samples = 10000;
  WitnessFlags wf;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", common.file, "system description")->required();
    sub->add_flag("--json", common.json, "JSON output");
    sub->add_option("--tol", common.tol, "relative tolerance")->capture_default_str();
    sub->add_option("--seed", common.seed, "random seed")->capture_default_str();
    sub->add_option("--out", common.out, "write output to PATH");
  };
  auto* check_cmd = app.add_subcommand("check", "decide ellipticity, cancellation, CC, weak cancellation and CWC");
  add_common(check_cmd);
  check_cmd->add_option("--samples", samples, "sphere samples for ellipticity when n >= 3")->capture_default_str();
  auto* ann_cmd = app.add_subcommand("annihilator", "print the exact annihilator L(D)");
  add_common(ann_cmd);
  auto* mom_cmd = app.add_subcommand("moment", "compute the moment map M_A");
  add_common(mom_cmd);
  auto* hom_cmd = app.add_subcommand("homogenize", "print the homogenized constraint (or operator)");
  add_common(hom_cmd);
  auto* wit_cmd = app.add_subcommand("witness", "spectral blow-up experiment; CSV epsilon,ratio,residual");
  add_common(wit_cmd);
  wit_cmd->add_option("--grid", wf.grid, "points per axis (power of two)")->capture_default_str();
  wit_cmd->add_option("--eps", wf.eps, "comma-separated mollification widths")->capture_default_str();
  wit_cmd->add_option("--j", wf.j, "derivative gap j or 'inf'")->capture_default_str();
  wit_cmd->add_option("--dir", wf.dir, "direction e in E, comma-separated rationals");
  wit_cmd->add_option("--mode", wf.mode, "dirac or random")->capture_default_str();
  wit_cmd->add_flag("--lenient", wf.lenient, "least-squares solve without the residual check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*check_cmd) return run_check(common, samples);
    if (*ann_cmd) return run_annihilator(common);
    if (*mom_cmd) return run_moment(common);
    if (*hom_cmd) return run_homogenize(common);
    if (*wit_cmd) return run_witness(common, wf);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
