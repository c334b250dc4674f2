#include "contsym/simulator.hpp"

#include <fftw3.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace contsym::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-place complex FFT of fixed length; plans are cached per size.
class Fft {
 public:
  explicit Fft(int m) : m_(m) {
    buf_ = fftw_alloc_complex(m);
    fwd_ = fftw_plan_dft_1d(m, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(m, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(Field& f) { run(f, fwd_, 1.0); }
  void backward(Field& f) { run(f, bwd_, 1.0 / m_); }

 private:
  void run(Field& f, fftw_plan p, double scale) {
    auto* d = reinterpret_cast<fftw_complex*>(f.data());
    for (int i = 0; i < m_; ++i) {
      buf_[i][0] = d[i][0];
      buf_[i][1] = d[i][1];
    }
    fftw_execute(p);
    for (int i = 0; i < m_; ++i) {
      d[i][0] = buf_[i][0] * scale;
      d[i][1] = buf_[i][1] * scale;
    }
  }

  int m_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

Fft& fft_for(int m) {
  static std::map<int, std::unique_ptr<Fft>> cache;
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<Fft>(m);
  return *slot;
}

// shortest text that round-trips
std::string fmt17(double v) {
  char b[40];
  auto r = std::to_chars(b, b + sizeof b, v);
  return std::string(b, r.ptr);
}

void check_field(const Grid& g, const Field& u) {
  if (static_cast<int>(u.size()) != g.m) throw Error("field length does not match grid");
}

// R, R_x, R_xx of |u| (floored).
struct Amplitude {
  std::vector<double> r, rx, rxx;
};

Amplitude amplitude(const Grid& g, const Field& u, double eps) {
  Amplitude a;
  a.r.resize(u.size());
  for (size_t i = 0; i < u.size(); ++i) a.r[i] = std::max(std::abs(u[i]), eps);
  Field h(u.size());
  for (size_t i = 0; i < u.size(); ++i) h[i] = a.r[i];
  auto& f = fft_for(g.m);
  f.forward(h);
  auto k = g.k();
  Field d1(h.size()), d2(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    d1[i] = cplx(0, k[i]) * h[i];
    d2[i] = -k[i] * k[i] * h[i];
  }
  // Nyquist mode has no well-defined odd derivative.
  d1[g.m / 2] = 0;
  f.backward(d1);
  f.backward(d2);
  a.rx.resize(u.size());
  a.rxx.resize(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    a.rx[i] = d1[i].real();
    a.rxx[i] = d2[i].real();
  }
  return a;
}

// (Lap R / R) P(s) with the 1/s term written as (grad R)^2 / R^2.
double weighted(const Laurent& p, double r, double rx, double rxx, double eps) {
  if (p.is_zero()) return 0;
  double lr = rxx / r;
  double g2 = rx * rx;
  double out = p.inv * g2 / (r * r);
  if (!p.c.empty()) {
    double s = r * rxx / std::max(g2, eps);
    double sk = 1, acc = 0;
    for (double c : p.c) {
      acc += c * sk;
      sk *= s;
    }
    out += lr * acc;
  }
  return out;
}

Field nonlinear_rhs(const Grid& g, const NonlinearSpec& spec, const Field& u, double eps) {
  auto a = amplitude(g, u, eps);
  Field out(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    double wm = weighted(spec.m, a.r[i], a.rx[i], a.rxx[i], eps);
    double wn = weighted(spec.n, a.r[i], a.rx[i], a.rxx[i], eps);
    out[i] = cplx(wm, -wn) * u[i];
  }
  return out;
}

bool all_finite(const Field& u) {
  for (auto& z : u)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double l2(const std::vector<double>& v, double dx) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s * dx);
}

void check_uniform(const Trajectory& tr) {
  if (tr.t.size() < 3) throw Error("need at least three snapshots for a time derivative");
  for (size_t i = 1; i < tr.t.size(); ++i)
    if (std::abs((tr.t[i] - tr.t[i - 1]) - tr.dt_out) > 1e-9 * std::max(1.0, tr.dt_out))
      throw Error("snapshots are not uniformly spaced");
}

}  // namespace

std::vector<double> Grid::x() const {
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = -L + i * dx();
  return out;
}

std::vector<double> Grid::k() const {
  std::vector<double> out(m);
  double base = kPi / L;
  for (int i = 0; i < m; ++i) out[i] = base * (i <= m / 2 ? i : i - m);
  return out;
}

void Grid::validate() const {
  if (!(L > 0) || !std::isfinite(L)) throw Error("grid half-width L must be positive");
  if (m < 16 || (m & (m - 1)) != 0) throw Error("grid size m must be a power of two >= 16");
}

bool Laurent::is_zero() const {
  if (inv != 0) return false;
  for (double v : c)
    if (v != 0) return false;
  return true;
}

double Laurent::operator()(double s) const {
  double acc = 0, sk = 1;
  for (double v : c) {
    acc += v * sk;
    sk *= s;
  }
  return acc + inv / s;
}

std::string Laurent::str() const {
  std::ostringstream os;
  bool first = true;
  auto term = [&](double v, const std::string& mono) {
    if (v == 0) return;
    if (!first) os << (v < 0 ? " - " : " + ");
    else if (v < 0) os << "-";
    os << fmt17(std::abs(v)) << mono;
    first = false;
  };
  for (size_t i = 0; i < c.size(); ++i)
    term(c[i], i == 0 ? "" : (i == 1 ? "*s" : "*s^" + std::to_string(i)));
  term(inv, "/s");
  return first ? "0" : os.str();
}

NonlinearSpec NonlinearSpec::free() { return {}; }

NonlinearSpec NonlinearSpec::general(Laurent m, Laurent n) {
  NonlinearSpec s;
  s.preset = Preset::General;
  s.m = std::move(m);
  s.n = std::move(n);
  return s;
}

NonlinearSpec NonlinearSpec::case2(double lambda) {
  NonlinearSpec s;
  s.preset = Preset::Case2;
  s.m = Laurent{{-lambda}, -lambda};
  s.lambda = lambda;
  return s;
}

NonlinearSpec NonlinearSpec::hamilton_jacobi() {
  NonlinearSpec s;
  s.preset = Preset::HamiltonJacobi;
  s.n = Laurent{{0.5}, 0};
  return s;
}

std::string NonlinearSpec::name() const {
  switch (preset) {
    case Preset::Free: return "free";
    case Preset::General: return "general";
    case Preset::Case2: return "case2";
    case Preset::HamiltonJacobi: return "hamilton-jacobi";
  }
  return "?";
}

State Trajectory::final_state() const {
  if (u.empty()) throw Error("empty trajectory");
  State s;
  s.grid = grid;
  s.u = u.back();
  s.t = t.back();
  return s;
}

State gaussian_packet(const Grid& grid, double x0, double k0, double w, double chirp) {
  grid.validate();
  if (!(w > 0)) throw Error("packet width must be positive");
  if (std::abs(x0) >= grid.L) throw Error("packet centre outside the domain");
  double outside = 0.5 * std::erfc((grid.L - x0) / w) + 0.5 * std::erfc((grid.L + x0) / w);
  if (outside > 1e-12) throw Error("packet too wide for the domain: mass outside exceeds 1e-12");
  State s;
  s.grid = grid;
  s.u.resize(grid.m);
  double norm = std::pow(kPi * w * w, -0.25);
  auto x = grid.x();
  for (int i = 0; i < grid.m; ++i) {
    double d = x[i] - x0;
    s.u[i] = norm * std::exp(cplx(-d * d / (2 * w * w), k0 * x[i] + 0.5 * chirp * x[i] * x[i]));
  }
  return s;
}

Field analytic_free_gaussian(const Grid& grid, double x0, double k0, double w, double t) {
  cplx s(w * w, t);
  cplx pre = std::pow(kPi * w * w, -0.25) * std::sqrt(cplx(w * w, 0) / s);
  auto x = grid.x();
  Field u(grid.m);
  for (int i = 0; i < grid.m; ++i) {
    double d = x[i] - x0 - k0 * t;
    u[i] = pre * std::exp(-d * d / (2.0 * s) + cplx(0, k0 * x[i] - 0.5 * k0 * k0 * t));
  }
  return u;
}

Trajectory evolve(const State& s0, const NonlinearSpec& spec, const EvolveOptions& opts) {
  const Grid& g = s0.grid;
  g.validate();
  check_field(g, s0.u);
  if (!(opts.dt > 0) || !(opts.t_final >= 0)) throw Error("dt must be positive and t_final non-negative");
  if (opts.steps_per_snapshot < 1) throw Error("steps_per_snapshot must be >= 1");
  bool nonlinear = spec.has_nonlinearity();
  double dx = g.dx();
  if (nonlinear && opts.dt > opts.c_stab * dx * dx * (1 + 1e-12))
    throw Error("dt " + fmt17(opts.dt) + " exceeds stability bound " + fmt17(opts.c_stab * dx * dx));

  long steps = static_cast<long>(std::ceil(opts.t_final / opts.dt - 1e-9));
  double dt = steps > 0 ? opts.t_final / steps : opts.dt;

  Trajectory tr;
  tr.grid = g;
  tr.spec = spec;
  tr.dt = dt;
  tr.dt_out = dt * opts.steps_per_snapshot;

  auto& f = fft_for(g.m);
  auto k = g.k();
  Field half(g.m);
  for (int i = 0; i < g.m; ++i) half[i] = std::exp(cplx(0, -k[i] * k[i] * dt / 4));

  Field u = s0.u;
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.u.push_back(u);
    tr.mass.push_back(mass(g, u));
  };
  record(s0.t);

  auto linear = [&](int times) {
    f.forward(u);
    for (int i = 0; i < g.m; ++i) {
      cplx ph = half[i];
      if (times == 2) ph *= half[i];
      u[i] *= ph;
    }
    f.backward(u);
  };

  double eps = s0.eps;
  for (long n = 1; n <= steps; ++n) {
    if (!nonlinear) {
      linear(2);
    } else {
      linear(1);
      Field k1 = nonlinear_rhs(g, spec, u, eps);
      Field tmp(g.m);
      for (int i = 0; i < g.m; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
      Field k2 = nonlinear_rhs(g, spec, tmp, eps);
      for (int i = 0; i < g.m; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
      Field k3 = nonlinear_rhs(g, spec, tmp, eps);
      for (int i = 0; i < g.m; ++i) tmp[i] = u[i] + dt * k3[i];
      Field k4 = nonlinear_rhs(g, spec, tmp, eps);
      for (int i = 0; i < g.m; ++i) u[i] += dt / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      linear(1);
    }
    if (!all_finite(u)) {
      tr.blew_up = true;
      tr.message = "non-finite field at t = " + fmt17(s0.t + n * dt);
      return tr;
    }
    if (n % opts.steps_per_snapshot == 0 || n == steps) record(s0.t + n * dt);
  }
  return tr;
}

State galilei_boost(const State& s, double v, bool check_boundary) {
  const Grid& g = s.grid;
  check_field(g, s.u);
  double a = v * s.t;
  Field u = s.u;
  if (a != 0) {
    auto& f = fft_for(g.m);
    auto k = g.k();
    f.forward(u);
    for (int i = 0; i < g.m; ++i) {
      if (i == g.m / 2) {
        u[i] *= std::cos(k[i] * a);  // real part of the symmetric Nyquist shift
        continue;
      }
      u[i] *= std::exp(cplx(0, -k[i] * a));
    }
    f.backward(u);
  }
  auto x = g.x();
  for (int i = 0; i < g.m; ++i) u[i] *= std::exp(cplx(0, v * x[i] - 0.5 * v * v * s.t));
  State out = s;
  out.u = std::move(u);
  if (!check_boundary) return out;
  double total = mass(out), edge = 0;
  for (int i = 0; i < g.m; ++i)
    if (std::abs(x[i]) > 0.9 * g.L) edge += std::norm(out.u[i]) * g.dx();
  if (total > 0 && edge / total > 1e-10)
    throw BoundaryContamination("boosted packet reaches the boundary layer: mass fraction " + fmt17(edge / total));
  return out;
}

double mass(const Grid& g, const Field& u) {
  double s = 0;
  for (auto& z : u) s += std::norm(z);
  return s * g.dx();
}

double mass(const State& s) { return mass(s.grid, s.u); }

std::vector<double> spectral_derivative(const Grid& g, const std::vector<double>& f, int order) {
  Field c(f.begin(), f.end());
  c = spectral_derivative(g, c, order);
  std::vector<double> out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = c[i].real();
  return out;
}

Field spectral_derivative(const Grid& g, const Field& f, int order) {
  check_field(g, f);
  if (order < 0) throw Error("derivative order must be non-negative");
  Field h = f;
  auto& F = fft_for(g.m);
  auto k = g.k();
  F.forward(h);
  for (int i = 0; i < g.m; ++i) {
    if (order % 2 == 1 && i == g.m / 2) {
      h[i] = 0;
      continue;
    }
    h[i] *= std::pow(cplx(0, k[i]), order);
  }
  F.backward(h);
  return h;
}

Fields density_current_fields(const State& s, CurrentMode mode, double lambda) {
  check_field(s.grid, s.u);
  Field ux = spectral_derivative(s.grid, s.u, 1);
  Fields out;
  out.rho.resize(s.u.size());
  out.j.resize(s.u.size());
  for (size_t i = 0; i < s.u.size(); ++i) {
    out.rho[i] = std::norm(s.u[i]);
    out.j[i] = (std::conj(s.u[i]) * ux[i]).imag();
  }
  if (mode == CurrentMode::Galilei) {
    auto rx = spectral_derivative(s.grid, out.rho, 1);
    for (size_t i = 0; i < rx.size(); ++i) out.j[i] += lambda * rx[i];
  }
  return out;
}

std::vector<double> continuity_residual(const Trajectory& tr, ResidualMode mode, double lambda) {
  check_uniform(tr);
  const Grid& g = tr.grid;
  double dx = g.dx();
  std::vector<double> out;
  for (size_t n = 1; n + 1 < tr.t.size(); ++n) {
    State s{g, tr.u[n], tr.t[n]};
    Fields fc = density_current_fields(s, CurrentMode::Classical);
    auto jx = spectral_derivative(g, fc.j, 1);
    std::vector<double> res(g.m);
    for (int i = 0; i < g.m; ++i)
      res[i] = (std::norm(tr.u[n + 1][i]) - std::norm(tr.u[n - 1][i])) / (2 * tr.dt_out) + jx[i];
    if (mode == ResidualMode::Galilei) {
      auto rxx = spectral_derivative(g, fc.rho, 2);
      for (int i = 0; i < g.m; ++i) res[i] += lambda * rxx[i];
    } else if (mode == ResidualMode::Case3) {
      auto a = amplitude(g, tr.u[n], s.eps);
      for (int i = 0; i < g.m; ++i)
        res[i] -= 2 * a.r[i] * a.r[i] * weighted(tr.spec.m, a.r[i], a.rx[i], a.rxx[i], s.eps);
    }
    out.push_back(l2(res, dx) / l2(fc.rho, dx));
  }
  return out;
}

std::vector<double> fokker_planck_residual(const Trajectory& tr, double lambda) {
  if (tr.spec.preset != Preset::Case2 || tr.spec.lambda != lambda)
    throw Error("Fokker-Planck residual requires a case2 trajectory with matching lambda");
  return continuity_residual(tr, ResidualMode::Galilei, lambda);
}

std::vector<double> phase_residual(const Trajectory& tr) {
  check_uniform(tr);
  const Grid& g = tr.grid;
  std::vector<double> out;
  for (size_t n = 1; n + 1 < tr.t.size(); ++n) {
    const Field& u = tr.u[n];
    Field ux = spectral_derivative(g, u, 1);
    double num = 0, den = 0;
    for (int i = 0; i < g.m; ++i) {
      double r2 = std::norm(u[i]);
      if (r2 < 1e-20) continue;
      cplx ut = (tr.u[n + 1][i] - tr.u[n - 1][i]) / (2 * tr.dt_out);
      double th_t = (std::conj(u[i]) * ut).imag() / r2;
      double th_x = (std::conj(u[i]) * ux[i]).imag() / r2;
      double e = th_t + 0.5 * th_x * th_x;
      num += r2 * e * e;
      den += r2 * std::pow(0.5 * th_x * th_x, 2);
    }
    out.push_back(std::sqrt(num / std::max(den, 1e-300)));
  }
  return out;
}

double relative_l2(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw Error("field sizes differ");
  double num = 0, den = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

double boost_covariance_error(const State& u0, const NonlinearSpec& spec, double v, const EvolveOptions& opts) {
  auto a = evolve(galilei_boost(u0, v), spec, opts);
  auto b = evolve(u0, spec, opts);
  if (a.blew_up || b.blew_up) throw BlowUp("evolution blew up during boost test");
  State bb = galilei_boost(b.final_state(), v);
  return relative_l2(a.u.back(), bb.u);
}

double time_reversal_error(const State& u0, const NonlinearSpec& spec, const EvolveOptions& opts) {
  if (!spec.reversible()) throw Error("time reversal requires M = 0");
  auto fwd = evolve(u0, spec, opts);
  if (fwd.blew_up) throw BlowUp(fwd.message);
  State back = fwd.final_state();
  for (auto& z : back.u) z = std::conj(z);
  back.t = 0;
  auto bwd = evolve(back, spec, opts);
  if (bwd.blew_up) throw BlowUp(bwd.message);
  Field u = bwd.u.back();
  for (auto& z : u) z = std::conj(z);
  return relative_l2(u, u0.u);
}

void write_file_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path p(path);
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto " + p.string() + ": " + ec.message());
  }
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ostringstream os;
  os << "t,x,re_u,im_u,rho,j\n";
  auto x = tr.grid.x();
  for (size_t n = 0; n < tr.t.size(); ++n) {
    State s{tr.grid, tr.u[n], tr.t[n]};
    auto fc = density_current_fields(s, CurrentMode::Classical);
    for (int i = 0; i < tr.grid.m; ++i)
      os << fmt17(tr.t[n]) << ',' << fmt17(x[i]) << ',' << fmt17(tr.u[n][i].real()) << ','
         << fmt17(tr.u[n][i].imag()) << ',' << fmt17(fc.rho[i]) << ',' << fmt17(fc.j[i]) << '\n';
  }
  write_file_atomic(path, os.str());
}

void write_monitor_csv(const Trajectory& tr, const std::string& path, double lambda) {
  std::vector<double> cont, fp;
  bool interior = tr.t.size() >= 3;
  if (interior) {
    ResidualMode mode = tr.spec.preset == Preset::General ? ResidualMode::Case3 : ResidualMode::Classical;
    cont = continuity_residual(tr, mode);
    fp = continuity_residual(tr, ResidualMode::Galilei, lambda);
  }
  std::ostringstream os;
  os << "t,mass,cont_res,fp_res\n";
  for (size_t n = 0; n < tr.t.size(); ++n) {
    os << fmt17(tr.t[n]) << ',' << fmt17(tr.mass[n]) << ',';
    if (interior && n > 0 && n + 1 < tr.t.size()) os << fmt17(cont[n - 1]) << ',' << fmt17(fp[n - 1]);
    else os << ',';
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

}  // namespace contsym::sim
