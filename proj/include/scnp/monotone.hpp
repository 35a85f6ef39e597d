#pragma once

// Maximal monotone operators and their generalized resolvents
//   J_r^M x = (J + r M)^{-1} J x,
// i.e. the unique u with J x in J u + r M u.

#include <variant>

#include "scnp/banach_space.hpp"
#include "scnp/convex_sets.hpp"

namespace scnp {

/// M x = {a x}, a >= 0.
struct Scaling {
  double a = 0.0;
};

/// M x = {B x}, B symmetric positive semidefinite.
struct LinearPSD {
  Matrix b;
};

/// M = subdifferential of the indicator of a closed convex set.
struct IndicatorSubdifferential {
  ConvexSet set;
};

class MonotoneOp {
 public:
  using Variant = std::variant<Scaling, LinearPSD, IndicatorSubdifferential>;

  static MonotoneOp scaling(double a);
  /// Checks symmetry and that the smallest eigenvalue is >= -1e-10.
  static MonotoneOp linear_psd(Matrix b);
  static MonotoneOp indicator(ConvexSet set);

  const Variant& variant() const noexcept { return v_; }
  bool is_single_valued() const noexcept { return !std::holds_alternative<IndicatorSubdifferential>(v_); }

 private:
  explicit MonotoneOp(Variant v) : v_(std::move(v)) {}

  Variant v_;
};

/// The unique element of M x. Throws kNotSingleValued for the indicator.
Vector eval(const MonotoneOp& m, const Vector& x);

struct ResolventOptions {
  double tol = 1e-12;
  int max_newton_iters = 200;
  ProjectionOptions projection{};
};

/// J_r^M x in geometry g.
///
/// Closed forms for p = 2 (x / (1 + r a), or a linear solve with I + r B);
/// the indicator delegates to the generalized projection. Other cases run a
/// damped Newton iteration on J u + r M u - J x = 0, in the primal variable
/// for p >= 2 and in the dual variable v = J u for p < 2 (so the Jacobian
/// stays bounded).
///
/// Throws kInvalidParameter for r <= 0 and kNoConvergence when the residual
/// stays above tol.
Vector generalized_resolvent(const MonotoneOp& m, double r, const Vector& x, const SpaceGeometry& g,
                             const ResolventOptions& opts = {});

/// |J u + r M u - J x| in the dual norm; only for single-valued operators.
double resolvent_residual(const MonotoneOp& m, double r, const Vector& x, const Vector& u, const SpaceGeometry& g);

/// phi(y, J_r x) + phi(J_r x, x) <= phi(y, x) + 1e-8, where y is a null point
/// of M supplied by the caller.
bool check_resolvent_inequality(const MonotoneOp& m, double r, const Vector& x, const Vector& y_zero,
                                const SpaceGeometry& g);

}  // namespace scnp
