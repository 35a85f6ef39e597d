#pragma once

// Damped Newton kernels shared by the projection and resolvent solvers.
// Internal header; not part of the public interface.

#include <functional>

#include "scnp/banach_space.hpp"

namespace scnp::detail {

struct NewtonOptions {
  int max_iters = 200;
  double grad_tol = 1e-13;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
  /// Condition number above which the analytic Jacobian is replaced by a
  /// central-difference one (root finder only).
  double max_condition = 1e12;
};

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct SmoothObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

/// Minimizes a smooth convex function. Newton directions come from the
/// Hessian with Levenberg regularization when it is (nearly) singular;
/// steps are Armijo-damped.
NewtonResult newton_minimize(const SmoothObjective& f, Vector x0, const NewtonOptions& opts);

/// Solves F(x) = 0 with Armijo damping on 0.5 |F|^2. Falls back to a
/// central-difference Jacobian when the analytic one is ill-conditioned.
NewtonResult newton_root(const std::function<Vector(const Vector&)>& residual,
                         const std::function<Matrix(const Vector&)>& jacobian, Vector x0,
                         const NewtonOptions& opts);

}  // namespace scnp::detail
