#pragma once

// Hybrid projection iteration for the split common null point problem
//   find z with 0 in M1 z and 0 in M2 (A z),
// with the fixed-point constraint carried by a W-mapping and a
// nonexpansive S. Each step builds
//   u_n = J^{-1}((1-a_n) J x_n + a_n J Pi_C J^{-1}(s_n J W_n x_n + (1-s_n) J S x_n))
//   z_n = J_{l_n}^{M1}(u_n + e_n),   w_n = Q_{m_n}^{M2}(A z_n)
//   y_n = Pi_C J^{-1}(J z_n - gamma A^T J_F(A z_n - w_n))
// and three halfspaces C_n, D_n, Q_n, then sets
//   x_{n+1} = Pi_{C ∩ C_n ∩ D_n ∩ Q_n} x_1.

#include <array>
#include <functional>
#include <vector>

#include "scnp/banach_space.hpp"
#include "scnp/convex_sets.hpp"
#include "scnp/monotone.hpp"
#include "scnp/wmapping.hpp"

namespace scnp {

/// A real sequence indexed from n = 1, given by a named rule or by explicit
/// values (the last value repeats past the end of the list).
class ScalarSchedule {
 public:
  enum class Rule { kConstant, kReciprocal, kRatio, kExplicit };

  /// c
  static ScalarSchedule constant(double c);
  /// scale / (n + offset)
  static ScalarSchedule reciprocal(double scale, double offset);
  /// n / (n + offset)
  static ScalarSchedule ratio(double offset);
  static ScalarSchedule explicit_values(std::vector<double> values);

  double at(int n) const;

  Rule rule() const noexcept { return rule_; }
  double value() const noexcept { return value_; }
  double scale() const noexcept { return scale_; }
  double offset() const noexcept { return offset_; }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const ScalarSchedule&, const ScalarSchedule&) = default;

 private:
  ScalarSchedule() = default;

  Rule rule_ = Rule::kConstant;
  double value_ = 0.0;
  double scale_ = 0.0;
  double offset_ = 0.0;
  std::vector<double> values_;
};

struct ParameterSchedules {
  ScalarSchedule alpha = ScalarSchedule::reciprocal(1.0, 1.0);
  ScalarSchedule sigma = ScalarSchedule::ratio(1.0);
  ScalarSchedule lambda = ScalarSchedule::constant(0.25);
  ScalarSchedule mu = ScalarSchedule::constant(0.25);
  /// e_n = error(n) * error_direction; an empty direction means all ones.
  ScalarSchedule error = ScalarSchedule::constant(0.0);
  Vector error_direction;
  /// Lower bound a with 0 < a <= lambda_n, mu_n.
  double floor = 0.01;

  Vector error_at(int n, int dim) const;
  /// Throws kInvalidParameter unless alpha_n, sigma_n in (0, 1) and
  /// lambda_n, mu_n >= floor.
  void check(int n) const;
};

struct ProblemInstance {
  SpaceGeometry ge;
  SpaceGeometry gf;
  /// dim F x dim E.
  Matrix a;
  MonotoneOp m1;
  MonotoneOp m2;
  ConvexSet c;
  NonexpansiveMap s;
  WFamily family;
  ParameterSchedules schedules;
  double gamma = 0.1;
  /// Smoothness constant in the step bound gamma < 2 / (c |A|^2); 1 in
  /// Hilbert space, caller-supplied otherwise.
  double c_const = 1.0;
  Vector x1;
};

/// Spectral norm when both spaces are Hilbert; otherwise the conservative
/// stand-in max(induced 1-norm, induced inf-norm).
double operator_norm_bound(const Matrix& a, const SpaceGeometry& ge, const SpaceGeometry& gf);

/// Checks dimensions, A != 0, the step bound on gamma, x1 in C, the schedule
/// invariants at n = 1, and (on deterministic samples from C) that S and
/// every T_i are nonexpansive and the T_i map C into C.
void validate(const ProblemInstance& p);

/// Split feasibility instance: M1 = subdifferential of i_C, M2 = that of i_Q,
/// so both resolvents are generalized projections.
ProblemInstance make_sfp_instance(const ConvexSet& c, const ConvexSet& q, const Matrix& a, const NonexpansiveMap& s,
                                  const WFamily& family, const ParameterSchedules& schedules, double gamma,
                                  const Vector& x1, double p_e = 2.0, double p_f = 2.0, double c_const = 1.0);

struct Diagnostics {
  double step_norm = 0.0;       // |x_{n+1} - x_n|
  double split_residual = 0.0;  // |A z_n - w_n|
  double fix_residual = 0.0;    // |x_n - W_n x_n|
  double phi_x1 = 0.0;          // phi(x_n, x_1)
  double cond2_ratio = 0.0;     // |J x_n - J u_n| / alpha_n
  double y_residual = 0.0;      // |x_n - y_n|
};

enum class CutKind { kC = 0, kD = 1, kQ = 2 };

struct IterateState {
  int n = 0;
  Vector x;
  Vector u;
  Vector z;
  Vector w;
  Vector y;
  /// C_n, D_n, Q_n in that order.
  std::array<Halfspace, 3> cuts;
  Vector x_next;
  Diagnostics diag;
};

/// {z : <w_n - A z, J_F(A z_n - w_n)> >= 0} as <A^T J_F d, z> <= <w_n, J_F d>
/// with d = A z_n - w_n; the whole space when d = 0.
Halfspace build_cut_c(const Vector& z_n, const Vector& w_n, const Matrix& a, const SpaceGeometry& gf);

/// {z : phi(z, z_n) <= phi(z, v)} with v = u_n + e_n, which is the halfspace
/// <2 (J v - J z_n), z> <= |v|^2 - |z_n|^2.
Halfspace build_cut_d(const Vector& z_n, const Vector& v, const SpaceGeometry& ge);

/// {z : <x_n - z, J x_1 - J x_n> >= 0}; the whole space when x_n = x_1.
Halfspace build_cut_q(const Vector& x_n, const Vector& x1, const SpaceGeometry& ge);

/// One iteration from x_n.
IterateState step(const ProblemInstance& p, int n, const Vector& x_n);

struct StoppingRule {
  double tol = 1e-8;
  int max_iters = 100000;
  double divergence_guard = 1e8;
};

enum class RunStatus { kConverged, kBudgetExhausted };

struct RunResult {
  std::vector<IterateState> states;
  RunStatus status = RunStatus::kBudgetExhausted;
};

/// Iterates from x_1 until |x_{n+1} - x_n| <= tol or n = max_iters. Throws
/// kDiverged when |x_n| exceeds the guard; sub-solver errors propagate.
/// The optional observer sees each state as it is produced.
RunResult run(const ProblemInstance& p, const StoppingRule& stop = {},
              const std::function<void(const IterateState&)>& observer = {});

}  // namespace scnp
