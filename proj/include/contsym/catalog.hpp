#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "contsym/liesym.hpp"

namespace contsym::catalog {

using lie::NamedField;
using lie::PdeSystem;
using lie::VectorField;
using sym::Expr;
using sym::JetSpace;

/// A scalar function slot: either an opaque symbol or a fixed closed form.
struct Fn {
  std::string label;
  std::function<Expr(const std::vector<Expr>&)> apply;

  Expr operator()(const Expr& a) const { return apply({a}); }
  Expr operator()(const Expr& a, const Expr& b) const { return apply({a, b}); }

  static Fn opaque(const std::string& name);
  static Fn zero();
  static Fn constant(const mpq_class& c);
  /// c * s (single argument).
  static Fn linear(const mpq_class& c);
  static Fn fixed(std::string label, std::function<Expr(const std::vector<Expr>&)> f);
};

struct GeneratorFamily {
  std::string name;
  JetSpace space;
  std::vector<NamedField> members;
  std::map<std::string, std::string> parameters;

  const VectorField& get(const std::string& member) const;
  bool has(const std::string& member) const;
};

/// Spatial coordinate names for indices 1..n ("x" or "x1".."xn").
std::string spatial_name(int n, int a);
/// Sum_a D_a D_a e.
Expr laplacian(const Expr& e, const JetSpace& space);
/// Sum_a (D_a e)^2.
Expr grad_squared(const Expr& e, const JetSpace& space);

// ---------------------------------------------------------------- continuity equation

/// rho_t + sum_k j^k_{x_k} = 0 on dependents (rho, j1..jn).
PdeSystem continuity_equation(int n);
JetSpace continuity_space(int n);

/// X = xi^mu d_mu + (a^{mu nu} j^nu + b^mu) d_{j^mu}, j^0 = rho, with
/// a^{mu nu} = d xi^mu / d x_nu - delta_{mu nu} (d xi^i / d x_i + C).
/// Throws if b does not solve the continuity equation.
VectorField continuity_symmetry_field(int n, const std::vector<Expr>& xi, const mpq_class& c, const std::vector<Expr>& b);

struct ContinuitySymmetryMatch {
  bool ok = false;
  std::string reason;
  std::vector<Expr> xi;
  mpq_class c;
  std::vector<Expr> b;
};

/// Recovers (xi, C, b) from a field on the continuity space and checks that
/// continuity_symmetry_field rebuilds it exactly.
ContinuitySymmetryMatch match_continuity_symmetry(const VectorField& v, std::uint64_t seed = 1);

GeneratorFamily galilei_algebra(int n);
GeneratorFamily conformal_algebra(int n);

/// Random polynomial in the independents of `space` with rational coefficients.
Expr random_x_polynomial(const JetSpace& space, int degree, Rng& rng);

// ---------------------------------------------------------------- density and current in u, u*

JetSpace wave_space(int n);

struct DensityCurrent {
  JetSpace space;
  Expr rho;
  std::vector<Expr> j;
};

/// rho = f(u u*), j^k = -(i/2) g(u u*) (u_k u* - u u*_k) + D_k phi(u u*).
DensityCurrent density_current_general(int n, const Fn& f, const Fn& g, const Fn& phi);
DensityCurrent density_current_galilei(int n, const Fn& phi);
DensityCurrent density_current_classical(int n);

/// D_t rho + sum D_k j^k = 0 for the given density and current, solved for u_t.
PdeSystem continuity_of(const DensityCurrent& dc, const std::string& name);

/// rho_t + div j + lambda Laplacian rho with classical rho, j.
Expr fokker_planck_residual_expr(const mpq_class& lambda, int n);
PdeSystem fokker_planck_system(const mpq_class& lambda, int n);

/// t d_a + i x_a (u d_u - u* d_u*) and companions on the wave space.
GeneratorFamily wave_galilei(int n);

// ---------------------------------------------------------------- phase and amplitude

JetSpace phase_space(int n);

enum class PhiMode { Zero, Opaque, Lambda };
enum class FMode { Zero, SigmaN, Opaque };

/// R_t + R_k Theta_k + R Lap(Theta)/2 + Lap(phi(R^2))/(2R) = 0,
/// Theta_t + Theta_k^2/2 - Lap(R)/(2R) + F = 0.
PdeSystem phase_amplitude_system(PhiMode phi, FMode f, int n, const mpq_class& lambda = 0);

/// AG2-invariant form with M, N of ((grad R)^2 / R^{2+4/n}; Lap R / R^{1+4/n}).
PdeSystem ag2_invariant_system(const Fn& m, const Fn& nn, int n);

/// R_t + R_k Theta_k + R Lap(Theta)/2 - Lap(R) M(s) = 0,
/// Theta_t + Theta_k^2/2 - Lap(R)/(2R) + Lap(R)/R N(s) = 0, s = R Lap(R)/(grad R)^2.
PdeSystem schrodinger_full_algebra_system(const Fn& m, const Fn& nn, int n);

/// M(s) = -lambda (1 + 1/s), i.e. Lap(R) M = -lambda (Lap(R) + (grad R)^2 / R).
Fn case2_m(const mpq_class& lambda);

/// Amplitude-phase generators P_mu, J_ab, G_a, Q, D, I, A and Dt = D - (n/2) I.
GeneratorFamily amplitude_generators(int n);
GeneratorFamily phase_free_algebra(int n);         // P, J, Q, G, D
GeneratorFamily schrodinger_full_algebra(int n);   // P, J, Q, G, D, I, A
GeneratorFamily ag2_algebra(int n);                // P, J, G, Q, Dt, A

/// G_a with the imaginary coefficient t d_a + i x_a d_Theta.
VectorField printed_galilei_generator(int n, int a);

// ---------------------------------------------------------------- registry

std::vector<std::string> system_keys();
std::vector<std::string> algebra_keys();
/// Maps an accepted alias to its registered key; other strings pass through.
std::string resolve_system_key(const std::string& key);
/// True for registered keys and their aliases.
bool is_system_key(const std::string& key);

/// Builds a registered system. Unknown keys throw Error.
PdeSystem system_by_key(const std::string& key, int n, const mpq_class& lambda = mpq_class(1, 20));
/// Registered generator family (algebras plus extra single generators).
GeneratorFamily algebra_by_key(const std::string& key, int n);
/// The algebra naturally paired with a system key for verification.
GeneratorFamily default_algebra_for(const std::string& system_key, int n);

}  // namespace contsym::catalog
