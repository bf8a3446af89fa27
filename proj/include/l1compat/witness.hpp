#pragma once

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "l1compat/conditions.hpp"
#include "l1compat/report.hpp"

namespace l1c {

// Periodic grid on [0, 2 pi)^n with N points per axis.
struct Grid {
  std::size_t n = 0;
  std::size_t N = 0;

  double spacing() const { return 2.0 * std::numbers::pi / static_cast<double>(N); }
  double cell_volume() const { return std::pow(spacing(), static_cast<double>(n)); }
  std::size_t total() const {
    std::size_t t = 1;
    for (std::size_t d = 0; d < n; ++d) t *= N;
    return t;
  }
};

inline std::size_t max_grid_size(std::size_t n) { return n <= 3 ? 256 : n == 4 ? 32 : 16; }

inline Grid make_grid(std::size_t n, std::size_t N) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "grid dimension must be positive");
  if (N < 16 || (N & (N - 1)) != 0) throw Error(ErrorKind::InvalidArgument, "grid size must be a power of two >= 16, got " + std::to_string(N));
  if (N > max_grid_size(n))
    throw Error(ErrorKind::InvalidArgument, "grid size " + std::to_string(N) + " exceeds the cap " +
                                                std::to_string(max_grid_size(n)) + " for n = " + std::to_string(n));
  return {n, N};
}

// Signed wavenumber of FFT index i.
inline double wavenumber(std::size_t i, std::size_t N) {
  return i < N / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(N);
}

// Calls f(flat_index, index_tuple) over the grid in row-major order.
template <class F>
void for_each_index(const Grid& g, F&& f) {
  std::vector<std::size_t> idx(g.n, 0);
  const std::size_t total = g.total();
  for (std::size_t k = 0; k < total; ++k) {
    f(k, std::span<const std::size_t>(idx));
    for (std::size_t d = g.n; d-- > 0;) {
      if (++idx[d] < g.N) break;
      idx[d] = 0;
    }
  }
}

template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using ComplexArray = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

// A vector-valued field on the grid, one complex array per component. The
// same type holds physical values and spectra (unnormalized forward FFT).
struct Field {
  Grid grid;
  std::vector<ComplexArray> comp;

  static Field zeros(const Grid& g, std::size_t comps) {
    Field f;
    f.grid = g;
    f.comp.assign(comps, ComplexArray(g.total()));
    return f;
  }
  std::size_t comps() const { return comp.size(); }
};

// Forward and normalized backward transforms for one grid.
class Fft {
 public:
  explicit Fft(const Grid& g) : grid_(g) {
    ComplexArray a(g.total()), b(g.total());
    std::vector<int> dims(g.n, static_cast<int>(g.N));
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    fwd_ = fftw_plan_dft(static_cast<int>(g.n), dims.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(static_cast<int>(g.n), dims.data(), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  const Grid& grid() const { return grid_; }

  ComplexArray forward(const ComplexArray& x) const { return run(fwd_, x, 1.0); }
  ComplexArray backward(const ComplexArray& x) const { return run(bwd_, x, 1.0 / static_cast<double>(grid_.total())); }

  Field forward(const Field& f) const { return map(f, true); }
  Field backward(const Field& f) const { return map(f, false); }

 private:
  ComplexArray run(fftw_plan p, const ComplexArray& x, double scale) const {
    ComplexArray in(x), out(x.size());
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    if (scale != 1.0)
      for (auto& v : out) v *= scale;
    return out;
  }
  Field map(const Field& f, bool fwd) const {
    Field r;
    r.grid = f.grid;
    for (const auto& c : f.comp) r.comp.push_back(fwd ? forward(c) : backward(c));
    return r;
  }

  Grid grid_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

// Smallest admissible mollification width.
inline double min_epsilon(const Grid& g) { return 2.0 * g.spacing(); }

// Spectrum of the periodized unit-mass Gaussian of standard deviation eps
// centred at `center`.
inline ComplexArray gaussian_spectrum(const Grid& g, double eps, std::span<const double> center) {
  ComplexArray s(g.total());
  const double amp = static_cast<double>(g.total()) / std::pow(2.0 * std::numbers::pi, static_cast<double>(g.n));
  for_each_index(g, [&](std::size_t k, std::span<const std::size_t> idx) {
    double k2 = 0, phase = 0;
    for (std::size_t d = 0; d < g.n; ++d) {
      const double kd = wavenumber(idx[d], g.N);
      k2 += kd * kd;
      if (!center.empty()) phase += kd * center[d];
    }
    s[k] = amp * std::exp(-0.5 * eps * eps * k2) * std::complex<double>(std::cos(phase), -std::sin(phase));
  });
  return s;
}

// f(x) = rho_eps(x - center) e on the grid (physical values, real).
inline Field mollified_dirac(const Fft& fft, double eps, std::span<const double> e, std::span<const double> center = {}) {
  const Grid& g = fft.grid();
  if (eps < min_epsilon(g))
    throw Error(ErrorKind::EpsilonTooSmall, "eps = " + std::to_string(eps) + " is below 2 grid spacings (" +
                                                std::to_string(min_epsilon(g)) + ")");
  ComplexArray rho = fft.backward(gaussian_spectrum(g, eps, center));
  for (auto& v : rho) v = v.real();
  Field f = Field::zeros(g, e.size());
  for (std::size_t c = 0; c < e.size(); ++c)
    for (std::size_t k = 0; k < rho.size(); ++k) f.comp[c][k] = rho[k] * e[c];
  return f;
}

namespace witness_detail {

inline void eval_at(const NumericMatrixPolynomial& p, std::span<const double> kappa, Eigen::MatrixXd& out) {
  std::vector<double> buf(p.rows() * p.cols());
  p.eval(kappa, buf);
  out.resize(static_cast<Eigen::Index>(p.rows()), static_cast<Eigen::Index>(p.cols()));
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) out(i, j) = buf[i * p.cols() + j];
}

// Applies a real matrix mode by mode: out_hat(kappa) = m(kappa) in_hat(kappa).
template <class MatrixAt>
Field apply_modewise(const Field& in, std::size_t out_comps, MatrixAt&& matrix_at) {
  const Grid& g = in.grid;
  Field out = Field::zeros(g, out_comps);
  std::vector<double> kappa(g.n);
  Eigen::MatrixXd m;
  Eigen::VectorXcd x(static_cast<Eigen::Index>(in.comps()));
  for_each_index(g, [&](std::size_t k, std::span<const std::size_t> idx) {
    for (std::size_t d = 0; d < g.n; ++d) kappa[d] = wavenumber(idx[d], g.N);
    if (!matrix_at(kappa, k, m)) return;
    for (std::size_t c = 0; c < in.comps(); ++c) x(static_cast<Eigen::Index>(c)) = in.comp[c][k];
    const Eigen::VectorXcd y = m.cast<std::complex<double>>() * x;
    for (std::size_t c = 0; c < out_comps; ++c) out.comp[c][k] = y(static_cast<Eigen::Index>(c));
  });
  return out;
}

}  // namespace witness_detail

// Orthogonal projection of every nonzero mode onto ker C(kappa), using the
// homogenized constraint. The zero mode is left unchanged.
inline Field constrain_field(const Field& fhat, const OperatorSpec& c) {
  if (c.source_dim() != fhat.comps()) throw Error(ErrorKind::DimensionMismatch, "constraint source dimension differs from field components");
  const NumericMatrixPolynomial sym(homogenize(c).symbol());
  const std::size_t e = c.source_dim();
  Eigen::MatrixXd cm;
  return witness_detail::apply_modewise(fhat, e, [&](std::span<const double> kappa, std::size_t k, Eigen::MatrixXd& p) {
    p = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e));
    if (k == 0) return true;
    witness_detail::eval_at(sym, kappa, cm);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > 1e-12 * smax) p -= svd.matrixV().col(i) * svd.matrixV().col(i).transpose();
    return true;
  });
}

// (A u)^(kappa) = A(kappa) u^(kappa); D_j acts as the multiplier kappa_j.
inline Field apply_operator(const OperatorSpec& a, const Field& uhat) {
  if (a.source_dim() != uhat.comps()) throw Error(ErrorKind::DimensionMismatch, "operator source dimension differs from field components");
  const NumericMatrixPolynomial sym(a.symbol());
  return witness_detail::apply_modewise(uhat, a.target_dim(), [&](std::span<const double> kappa, std::size_t, Eigen::MatrixXd& m) {
    witness_detail::eval_at(sym, kappa, m);
    return true;
  });
}

struct SolveResult {
  Field u_hat;
  double residual = 0;      // |A u - f| / |f| over the nonzero modes
  double mean_removed = 0;  // |mean of f|
};

// Least-squares spectral solve u^(kappa) = A^dagger(kappa) f^(kappa) for
// kappa != 0 and u^(0) = 0. With strict set, a residual above tol raises
// ResidualTooLarge.
inline SolveResult solve_system(const OperatorSpec& a, const Field& fhat, bool strict = false, double tol = 1e-8) {
  if (a.target_dim() != fhat.comps()) throw Error(ErrorKind::DimensionMismatch, "operator target dimension differs from field components");
  const Grid& g = fhat.grid;
  const NumericMatrixPolynomial sym(a.symbol());
  const std::size_t dv = a.source_dim();
  SolveResult r;
  double m2 = 0;
  for (const auto& c : fhat.comp) m2 += std::norm(c[0]);
  r.mean_removed = std::sqrt(m2) / static_cast<double>(g.total());
  Eigen::MatrixXd am;
  r.u_hat = witness_detail::apply_modewise(fhat, dv, [&](std::span<const double> kappa, std::size_t k, Eigen::MatrixXd& p) {
    if (k == 0) return false;
    witness_detail::eval_at(sym, kappa, am);
    const Eigen::MatrixXd gm = am.transpose() * am;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gm);
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    if (d.size() && (d.maxCoeff() == 0 || d.minCoeff() < 1e-12 * d.maxCoeff()))
      throw Error(ErrorKind::NotElliptic, "A*A is singular at a nonzero grid frequency");
    p = ldlt.solve(am.transpose());
    return true;
  });
  const Field back = apply_operator(a, r.u_hat);
  double num = 0, den = 0;
  for (std::size_t c = 0; c < fhat.comps(); ++c)
    for (std::size_t k = 1; k < g.total(); ++k) {
      num += std::norm(back.comp[c][k] - fhat.comp[c][k]);
      den += std::norm(fhat.comp[c][k]);
    }
  r.residual = den > 0 ? std::sqrt(num / den) : 0.0;
  if (strict && r.residual > tol)
    throw Error(ErrorKind::ResidualTooLarge, "relative residual " + std::to_string(r.residual) + " exceeds " + std::to_string(tol) +
                                                 "; the data is not in the range of A mode by mode");
  return r;
}

// Pointwise Euclidean magnitude of a physical field.
inline std::vector<double> magnitude(const Field& f) {
  std::vector<double> m(f.grid.total(), 0.0);
  for (const auto& c : f.comp)
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += std::norm(c[k]);
  for (auto& v : m) v = std::sqrt(v);
  return m;
}

// Discrete L^p norm (p = infinity gives the max norm) of a pointwise magnitude.
inline double lp_norm(const std::vector<double>& mag, const Grid& g, double p) {
  if (std::isinf(p)) return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  double s = 0;
  for (double v : mag) s += std::pow(v, p);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

inline double l1_norm(const Field& f) { return lp_norm(magnitude(f), f.grid, 1.0); }

// Pointwise |D^m u| = (sum over ordered m-tuples of |d_{j1..jm} u|^2)^{1/2}
// computed spectrally from u^.
inline std::vector<double> derivative_magnitude(const Fft& fft, const Field& uhat, unsigned m) {
  const Grid& g = uhat.grid;
  std::vector<double> acc(g.total(), 0.0);
  for (const auto& alpha : multi_indices_of_degree(g.n, m)) {
    const double mult = static_cast<double>(alpha.multinomial());
    for (const auto& c : uhat.comp) {
      ComplexArray d(c.size());
      for_each_index(g, [&](std::size_t k, std::span<const std::size_t> idx) {
        double f = 1;
        for (std::size_t v = 0; v < g.n; ++v)
          for (unsigned e = 0; e < alpha[v]; ++e) f *= wavenumber(idx[v], g.N);
        d[k] = f * c[k];
      });
      const ComplexArray x = fft.backward(d);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += mult * std::norm(x[k]);
    }
  }
  for (auto& v : acc) v = std::sqrt(v);
  return acc;
}

enum class Growth { Growing, Bounded, Indeterminate };

inline const char* to_string(Growth g) {
  switch (g) {
    case Growth::Growing: return "GROWING";
    case Growth::Bounded: return "BOUNDED";
    default: return "INDETERMINATE";
  }
}

enum class WitnessMode { Dirac, Random };

struct WitnessConfig {
  SystemSpec system;
  RationalVector direction;                  // Dirac mode; normalized before use
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  std::optional<unsigned> j;                 // empty: the L^infinity case
  std::size_t grid_size = 256;
  std::uint64_t seed = 0;
  WitnessMode mode = WitnessMode::Dirac;
  std::vector<double> center;                // empty: origin
  bool strict = true;
  double residual_tol = 1e-8;
  double growth_factor = 2.0;
  double flatness = 0.1;
  std::size_t random_bumps = 8;             // must exceed n + 1
};

struct WitnessRow {
  double epsilon = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double data_l1 = 0;
  std::string diagnostic;
};

struct WitnessResult {
  std::vector<WitnessRow> rows;
  Growth classification = Growth::Indeterminate;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<Diagnostic> diagnostics;
};

// Classification over rows ordered by decreasing epsilon: GROWING when every
// step increases and last/first exceeds growth_factor, BOUNDED when the total
// variation is below flatness times the mean, INDETERMINATE otherwise.
inline Growth classify(const std::vector<double>& ratios, double growth_factor = 2.0, double flatness = 0.1) {
  if (ratios.size() < 2) return Growth::Indeterminate;
  for (double r : ratios)
    if (!std::isfinite(r)) return Growth::Indeterminate;
  bool increasing = true;
  double tv = 0, mean = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    mean += ratios[i];
    if (i) {
      increasing = increasing && ratios[i] > ratios[i - 1];
      tv += std::abs(ratios[i] - ratios[i - 1]);
    }
  }
  mean /= static_cast<double>(ratios.size());
  if (increasing && ratios.back() > growth_factor * ratios.front()) return Growth::Growing;
  if (tv < flatness * mean) return Growth::Bounded;
  return Growth::Indeterminate;
}

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
};

// Least-squares line y = slope x + intercept with coefficient of determination.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  const double ssres = syy - f.slope * sxy;
  f.r2 = syy > 0 ? 1.0 - ssres / syy : 1.0;
  return f;
}

namespace witness_detail {

// Random bumps of width eps at eps * z_m, a scaled copy of one fixed
// profile for every eps.
inline Field random_bumps(const Fft& fft, double eps, std::size_t comps, const WitnessConfig& cfg) {
  const Grid& g = fft.grid();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> pos(cfg.random_bumps, std::vector<double>(g.n));
  std::vector<std::vector<double>> amp(cfg.random_bumps, std::vector<double>(comps));
  for (auto& p : pos)
    for (auto& x : p) x = normal(rng);
  for (auto& a : amp)
    for (auto& x : a) x = normal(rng);
  // Amplitudes with vanishing zeroth and first moments, so the projected data
  // decays like |x|^{-n-2}.
  const auto nb = static_cast<Eigen::Index>(cfg.random_bumps);
  Eigen::MatrixXd moments(nb, static_cast<Eigen::Index>(g.n + 1));
  for (Eigen::Index b = 0; b < nb; ++b) {
    moments(b, 0) = 1.0;
    for (std::size_t d = 0; d < g.n; ++d) moments(b, static_cast<Eigen::Index>(d + 1)) = pos[b][d];
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(moments);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nb, moments.cols());
  for (std::size_t c = 0; c < comps; ++c) {
    Eigen::VectorXd a(nb);
    for (Eigen::Index b = 0; b < nb; ++b) a(b) = amp[b][c];
    a -= q * (q.transpose() * a);
    for (Eigen::Index b = 0; b < nb; ++b) amp[b][c] = a(b);
  }
  Field f = Field::zeros(g, comps);
  for (std::size_t b = 0; b < cfg.random_bumps; ++b) {
    std::vector<double> center(g.n);
    for (std::size_t d = 0; d < g.n; ++d) center[d] = (cfg.center.empty() ? 0.0 : cfg.center[d]) + eps * pos[b][d];
    const Field bump = mollified_dirac(fft, eps, amp[b], center);
    for (std::size_t c = 0; c < comps; ++c)
      for (std::size_t k = 0; k < g.total(); ++k) f.comp[c][k] += bump.comp[c][k];
  }
  return f;
}

}  // namespace witness_detail

// For each eps builds the data (mollified Dirac along the direction, or
// constrained random bumps), projects it onto the constraint kernel when a
// constraint is present, solves A u = f spectrally and records
// |D^{k-j} u|_{L^{n/(n-j)}} / |f|_{L^1} (for j = infinity: |D^{k-n} u|_max / |f|_{L^1}).
inline WitnessResult blowup_experiment(const WitnessConfig& cfg) {
  const SystemSpec& sys = cfg.system;
  const OperatorSpec& a = sys.A;
  const std::size_t n = sys.n, k = a.order();
  if (!a.is_homogeneous()) throw Error(ErrorKind::NotHomogeneous, "witness experiments need an operator of a single order");
  if (cfg.j) {
    if (*cfg.j < 1 || *cfg.j > std::min<std::size_t>(k, n - 1))
      throw Error(ErrorKind::InvalidArgument, "j must lie in 1..min(k, n-1) = " + std::to_string(std::min<std::size_t>(k, n - 1)));
  } else if (k < n) {
    throw Error(ErrorKind::OrderTooLow, "the L-infinity experiment needs k >= n");
  }
  if (cfg.epsilons.empty()) throw Error(ErrorKind::InvalidArgument, "no epsilon values given");
  if (!cfg.center.empty() && cfg.center.size() != n) throw Error(ErrorKind::DimensionMismatch, "center must have n entries");

  const Grid g = make_grid(n, cfg.grid_size);
  const Fft fft(g);
  const std::size_t de = a.target_dim();
  WitnessResult res;

  std::vector<double> e;
  if (cfg.mode == WitnessMode::Dirac) {
    if (cfg.direction.size() != de) throw Error(ErrorKind::DimensionMismatch, "direction must have dim E = " + std::to_string(de) + " entries");
    if (is_zero(cfg.direction)) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
    e = to_double(cfg.direction);
    double s = 0;
    for (double x : e) s += x * x;
    for (double& x : e) x /= std::sqrt(s);
    if (sys.C && !kernel_intersection(*sys.C).contains(cfg.direction))
      res.diagnostics.push_back({"constraint_violation", "direction " + to_string(cfg.direction) +
                                                             " is not in the constraint kernel intersection; data is projected"});
  }
  std::vector<double> sorted = cfg.epsilons;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double eps : sorted)
    if (eps < min_epsilon(g))
      throw Error(ErrorKind::EpsilonTooSmall, "eps = " + std::to_string(eps) + " is below 2 grid spacings (" + std::to_string(min_epsilon(g)) + ")");

  const unsigned m = cfg.j ? static_cast<unsigned>(k - *cfg.j) : static_cast<unsigned>(k - n);
  const double p = cfg.j ? static_cast<double>(n) / static_cast<double>(n - *cfg.j) : std::numeric_limits<double>::infinity();
  for (double eps : sorted) {
    WitnessRow row;
    row.epsilon = eps;
    Field f = cfg.mode == WitnessMode::Dirac ? mollified_dirac(fft, eps, e, cfg.center)
                                             : witness_detail::random_bumps(fft, eps, de, cfg);
    Field fhat = fft.forward(f);
    if (sys.C) {
      fhat = constrain_field(fhat, *sys.C);
      f = fft.backward(fhat);
    }
    row.data_l1 = l1_norm(f);
    try {
      const SolveResult s = solve_system(a, fhat, cfg.strict, cfg.residual_tol);
      row.residual = s.residual;
      row.ratio = lp_norm(derivative_magnitude(fft, s.u_hat, m), g, p) / row.data_l1;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::ResidualTooLarge) throw;
      row.diagnostic = err.what();
      res.diagnostics.push_back({"residual_too_large", "eps = " + std::to_string(eps) + ": " + err.what()});
    }
    res.rows.push_back(std::move(row));
  }

  std::vector<double> ratios, xs, ys;
  for (const auto& r : res.rows) {
    ratios.push_back(r.ratio);
    if (std::isfinite(r.ratio)) {
      xs.push_back(std::log(1.0 / r.epsilon));
      ys.push_back(r.ratio);
    }
  }
  res.classification = classify(ratios, cfg.growth_factor, cfg.flatness);
  if (xs.size() >= 2) {
    const LinearFit fit = fit_line(xs, ys);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.r2 = fit.r2;
  }
  return res;
}

inline std::string to_csv(const WitnessResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon,ratio,residual\n";
  for (const auto& row : r.rows) os << row.epsilon << ',' << row.ratio << ',' << row.residual << '\n';
  return os.str();
}

inline nlohmann::ordered_json to_json(const WitnessResult& r, const WitnessConfig& cfg, std::string_view source = {}) {
  using nlohmann::ordered_json;
  auto num = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["input_hash"] = fnv1a64(source);
  j["seed"] = cfg.seed;
  ordered_json c;
  c["n"] = cfg.system.n;
  c["grid"] = cfg.grid_size;
  c["mode"] = cfg.mode == WitnessMode::Dirac ? "dirac" : "random";
  ordered_json dir = ordered_json::array();
  for (const auto& x : cfg.direction) dir.push_back(to_string(x));
  c["direction"] = cfg.mode == WitnessMode::Dirac ? dir : ordered_json(nullptr);
  c["j"] = cfg.j ? ordered_json(*cfg.j) : ordered_json("inf");
  c["epsilons"] = cfg.epsilons;
  c["strict"] = cfg.strict;
  c["residual_tol"] = cfg.residual_tol;
  c["growth_factor"] = cfg.growth_factor;
  c["flatness"] = cfg.flatness;
  j["config"] = c;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"epsilon", row.epsilon}, {"ratio", num(row.ratio)}, {"residual", num(row.residual)}, {"data_l1", row.data_l1}});
  j["rows"] = rows;
  j["classification"] = to_string(r.classification);
  j["slope"] = num(r.slope);
  j["intercept"] = num(r.intercept);
  j["r2"] = num(r.r2);
  ordered_json d = ordered_json::array();
  for (const auto& x : r.diagnostics) d.push_back({{"code", x.code}, {"message", x.message}});
  j["diagnostics"] = d;
  return j;
}

}  // namespace l1c
