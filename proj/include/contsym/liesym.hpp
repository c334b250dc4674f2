#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "contsym/calculus.hpp"
#include "contsym/evaluate.hpp"
#include "contsym/expr.hpp"

namespace contsym::lie {

using sym::Coord;
using sym::Expr;
using sym::FunctionBinding;
using sym::JetSpace;

class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

class SamplingFailure : public Error {
 public:
  using Error::Error;
};

class Unresolvable : public Error {
 public:
  using Error::Error;
};

/// Point vector field xi^i d/dx_i + eta^a d/du^a.
struct VectorField {
  JetSpace space;
  std::vector<Expr> xi;   // one per independent
  std::vector<Expr> eta;  // one per dependent

  VectorField() = default;
  /// Validates sizes and that no coefficient contains a derivative coordinate.
  VectorField(JetSpace space, std::vector<Expr> xi, std::vector<Expr> eta);
  static VectorField zero(const JetSpace& space);

  /// v(f) for a function of independents and dependents.
  Expr act(const Expr& f) const;
  /// All components, independents first.
  std::vector<Expr> components() const;
  bool is_zero() const;
  std::string str() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& v);

struct ProlongedVectorField {
  VectorField base;
  int order = 0;
  std::map<std::string, Expr> eta_j;  // coordinate key -> coefficient, |J| >= 1

  /// Coefficient of d/du_J (order 0 gives eta).
  const Expr& coefficient(const Coord& c) const;
};

/// eta^{J,i} = D_i eta^J - (D_i xi^m) u_{J,m}, for all |J| <= order.
ProlongedVectorField prolong(const VectorField& v, int order);

/// The same coefficient computed along an explicit index path, used to
/// cross-check path independence.
Expr prolong_along(const VectorField& v, int dep, const std::vector<int>& path);

/// sum xi^i de/dx_i + sum eta^J de/du_J.
Expr apply(const ProlongedVectorField& pv, const Expr& e);

/// Sampling hints for random jet points.
struct SamplingHints {
  std::vector<int> positive;                     // drawn in [1/4, 2]
  int root_degree = 1;                           // positive dependents drawn as w^d
  std::vector<std::pair<int, int>> conjugates;   // (u, u*): float mode sets u* = conj(u)
  std::vector<std::pair<Expr, double>> guards;   // reject unless |value| >= bound
};

struct PdeSystem {
  std::string name;
  JetSpace space;
  std::vector<Expr> equations;
  std::vector<std::pair<Coord, Expr>> solved_for;  // leading coordinate -> rhs
  std::map<std::string, std::string> parameters;
  SamplingHints hints;

  /// Opaque functions used by the equations (name, arity).
  std::vector<std::pair<std::string, int>> functions() const;
};

/// Solves an equation linear in `c` for c: c = -E|_{c=0} / dE/dc.
Expr solve_linear(const Expr& equation, const Coord& c);

/// Eliminates every principal coordinate (a derivative of a solved leading
/// coordinate) via D_K(rhs), recursively. Throws Unresolvable if the result
/// would exceed `max_order`.
Expr on_shell_reduce(const PdeSystem& system, const Expr& e, int max_order = 3);

enum class Mode { Exact, Float };
std::string mode_name(Mode m);

struct ResidualOptions {
  int trials = 25;
  std::uint64_t seed = 0;
  Mode mode = Mode::Exact;
  int function_degree = 3;  // degree of random instantiations of unbound functions
};

struct EquationResidual {
  double max_abs = 0;
  double max_rel = 0;
};

struct InvarianceReport {
  std::string system;
  std::string generator;
  Mode mode = Mode::Exact;
  std::uint64_t seed = 0;
  int trials = 0;
  double max_abs_residual = 0;
  double max_rel_residual = 0;
  std::vector<EquationResidual> equations;
  std::vector<double> point_residuals;  // per trial: max over equations of |residual|
  int nonzero_points = 0;
  int arbitrated_points = 0;            // float residuals settled in exact arithmetic
  bool zero_at_all_points = false;
};

void to_json(nlohmann::json& j, const InvarianceReport& r);

/// Random jet point for `system` assigning every coordinate up to `order`,
/// satisfying the sampling guards. Exact mode draws small rationals; float
/// mode draws dyadic values k/1024 so the exact arbiter sees the same point.
sym::ExactPoint sample_exact_point(const PdeSystem& system, int order, Rng& rng, const FunctionBinding& fb);
sym::FloatPoint sample_float_point(const PdeSystem& system, int order, Rng& rng, const FunctionBinding& fb);

/// Binding with every function of `names` missing from `fixed` drawn as a
/// random polynomial.
FunctionBinding complete_binding(const FunctionBinding& fixed, const std::vector<std::pair<std::string, int>>& names,
                                 int degree, Rng& rng);

/// Reduced invariance residuals pr v(Delta_a)|_{Delta=0}, one per equation.
std::vector<Expr> invariance_conditions(const PdeSystem& system, const VectorField& v);

InvarianceReport on_shell_residual(const PdeSystem& system, const VectorField& v, const std::string& generator_name,
                                   const ResidualOptions& opts, const FunctionBinding& fb = {});

/// [v, w] = v(w) - w(v), componentwise.
VectorField lie_bracket(const VectorField& v, const VectorField& w);

struct NamedField {
  std::string name;
  VectorField field;
};

enum class ClosureStatus { Closed, NotClosed, RankDeficient };
std::string closure_status_name(ClosureStatus s);

struct ClosureTable {
  ClosureStatus status = ClosureStatus::Closed;
  std::vector<std::string> names;
  /// coefficients[i][j][k]: [g_i, g_j] = sum_k c g_k (valid when status is Closed).
  std::vector<std::vector<std::vector<Exact>>> coefficients;
  /// First pair whose bracket left the span, when NotClosed.
  std::optional<std::pair<int, int>> witness;
  int rank = 0;
  bool all_rational = true;
};

ClosureTable closure_table(const std::vector<NamedField>& gens, std::uint64_t seed, const FunctionBinding& fb = {});

struct LinearSolve {
  int rank = 0;
  bool consistent = true;
  std::vector<Exact> x;  // filled when consistent with full column rank
};

/// Gaussian elimination for A x = b over Q(i).
LinearSolve solve_exact(std::vector<std::vector<Exact>> a, std::vector<Exact> b);

}  // namespace contsym::lie
