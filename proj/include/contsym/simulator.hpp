#pragma once

#include <complex>
#include <string>
#include <vector>

#include "contsym/scalar.hpp"

namespace contsym::sim {

using cplx = std::complex<double>;
using Field = std::vector<cplx>;

class BlowUp : public Error {
 public:
  using Error::Error;
};

class BoundaryContamination : public Error {
 public:
  using Error::Error;
};

/// Uniform periodic grid on [-L, L).
struct Grid {
  double L = 20;
  int m = 1024;

  double dx() const { return 2 * L / m; }
  std::vector<double> x() const;
  /// Angular wavenumbers in FFT order.
  std::vector<double> k() const;
  /// Throws unless m >= 16 is a power of two and L > 0.
  void validate() const;
};

struct State {
  Grid grid;
  Field u;
  double t = 0;
  double eps = 1e-12;  // floor for |u| and (grad |u|)^2
};

/// c[0] + c[1] s + c[2] s^2 + ... + inv / s.
struct Laurent {
  std::vector<double> c;
  double inv = 0;

  bool is_zero() const;
  double operator()(double s) const;
  std::string str() const;
};

enum class Preset { Free, General, Case2, HamiltonJacobi };

/// i u_t + u_xx / 2 = (Lap|u| / |u|) (N(s) + i M(s)) u with s = |u| Lap|u| / (grad|u|)^2.
struct NonlinearSpec {
  Preset preset = Preset::Free;
  Laurent m;
  Laurent n;
  double lambda = 0;

  static NonlinearSpec free();
  static NonlinearSpec general(Laurent m, Laurent n);
  /// Lap(R) M = -lambda (Lap(R) + (grad R)^2 / R), N = 0.
  static NonlinearSpec case2(double lambda);
  /// N = 1/2, M = 0.
  static NonlinearSpec hamilton_jacobi();

  std::string name() const;
  bool has_nonlinearity() const { return !(m.is_zero() && n.is_zero()); }
  /// Time-reversible under u -> u*, t -> -t (M = 0).
  bool reversible() const { return m.is_zero(); }
};

struct EvolveOptions {
  double dt = 1e-3;
  double t_final = 1;
  int steps_per_snapshot = 100;
  double c_stab = 0.5;
};

struct Trajectory {
  Grid grid;
  NonlinearSpec spec;
  double dt = 0;
  double dt_out = 0;
  std::vector<double> t;
  std::vector<Field> u;
  std::vector<double> mass;
  bool blew_up = false;
  std::string message;

  State final_state() const;
};

/// (pi w^2)^(-1/4) exp(-(x - x0)^2 / (2 w^2) + i k0 x + i chirp x^2 / 2).
/// Throws if more than 1e-12 of the line mass falls outside the domain.
State gaussian_packet(const Grid& grid, double x0, double k0, double w, double chirp = 0);

/// Free-particle evolution of the unchirped packet at time t.
Field analytic_free_gaussian(const Grid& grid, double x0, double k0, double w, double t);

/// Strang splitting: half linear step, RK4 nonlinear substep, half linear step.
/// Throws Error if dt exceeds c_stab dx^2 while a nonlinearity is present.
/// Non-finite values stop the run and set blew_up.
Trajectory evolve(const State& s, const NonlinearSpec& spec, const EvolveOptions& opts);

/// u'(x) = u(x - v t) exp(i (v x - v^2 t / 2)) at the state's time, the shift
/// done by trigonometric interpolation. Throws BoundaryContamination when more
/// than 1e-10 of the mass lies in |x| > 0.9 L, unless check_boundary is off.
State galilei_boost(const State& s, double v, bool check_boundary = true);

double mass(const State& s);
double mass(const Grid& g, const Field& u);

struct Fields {
  std::vector<double> rho;
  std::vector<double> j;
};

enum class CurrentMode { Classical, Galilei };

/// rho = |u|^2; classical j = Im(u* u_x); Galilei mode adds lambda d_x rho.
Fields density_current_fields(const State& s, CurrentMode mode, double lambda = 0);

enum class ResidualMode { Classical, Galilei, Case3 };

/// ||(rho_{i+1} - rho_{i-1}) / (2 dt_out) + div j_i||_2 / ||rho_i||_2 at interior
/// snapshots. Galilei adds lambda rho_xx; Case3 subtracts 2 |u| Lap|u| M(s).
std::vector<double> continuity_residual(const Trajectory& tr, ResidualMode mode, double lambda = 0);

/// Residual of rho_t + d_x j + lambda rho_xx with classical j; requires a
/// trajectory produced by the case2(lambda) preset.
std::vector<double> fokker_planck_residual(const Trajectory& tr, double lambda);

/// ||Theta_t + Theta_x^2 / 2|| / ||Theta_x^2 / 2|| at interior snapshots, with
/// Theta_x = Im(u* u_x)/|u|^2 and Theta_t = Im(u* u_t)/|u|^2, mass-weighted.
std::vector<double> phase_residual(const Trajectory& tr);

double relative_l2(const Field& a, const Field& b);

/// Relative L2 distance between boost-then-evolve and evolve-then-boost.
double boost_covariance_error(const State& u0, const NonlinearSpec& spec, double v, const EvolveOptions& opts);

/// Evolve forward by t_final, then backward via u -> conj(evolve(conj(u))).
double time_reversal_error(const State& u0, const NonlinearSpec& spec, const EvolveOptions& opts);

/// Spectral derivative of a real periodic array.
std::vector<double> spectral_derivative(const Grid& g, const std::vector<double>& f, int order);
Field spectral_derivative(const Grid& g, const Field& f, int order);

/// CSV with header t,x,re_u,im_u,rho,j (one block per snapshot).
void write_trajectory_csv(const Trajectory& tr, const std::string& path);
/// CSV with header t,mass,cont_res,fp_res (residuals empty at end snapshots).
void write_monitor_csv(const Trajectory& tr, const std::string& path, double lambda);

/// Writes `text` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace contsym::sim
