#pragma once

// The one-dimensional reference instance: E = F = R, C = [0, 1], A x = -2x,
// M1 x = {2x}, M2 y = {3y}, lambda_n = mu_n = 0.25, e_n = 1/n, gamma = 0.1,
// S = T_i = identity. Its iterates have closed forms in s = x_n + 1/n:
//   u = x_n, z = (2/3) s, w = -(16/21) s, y = clamp((116/210) s, 0, 1),
//   C_n: z <= (16/42) s,  D_n: z <= (5/6) s,  Q_n: (x_n - z)(x_1 - x_n) >= 0.
// The recurrence below evaluates those closed forms with interval
// arithmetic only, independent of the general solver.

#include <vector>

#include "scnp/solver.hpp"

namespace scnp {

struct ScalarExampleRow {
  int n = 0;
  double x = 0.0;
  double u = 0.0;
  double z = 0.0;
  double w = 0.0;
  double y = 0.0;
  double c_bound = 0.0;
  double d_bound = 0.0;
  double x_next = 0.0;
};

/// Rows n = 1..steps of the closed-form recurrence from x1 in [0, 1].
std::vector<ScalarExampleRow> scalar_example_recurrence(double x1, int steps);

/// The same instance expressed for the general solver.
ProblemInstance scalar_example_instance(double x1);

struct ExampleComparison {
  int steps = 0;
  double u = 0.0;
  double z = 0.0;
  double w = 0.0;
  double y = 0.0;
  double c_bound = 0.0;
  double d_bound = 0.0;
  double x_next = 0.0;

  double max_deviation() const;
};

/// Runs both for `steps` iterations and reports the largest absolute
/// deviation per component.
ExampleComparison compare_scalar_example(double x1, int steps);

}  // namespace scnp
