#include "scnp/example_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scnp/error.hpp"

namespace scnp {

std::vector<ScalarExampleRow> scalar_example_recurrence(double x1, int steps) {
  if (!(x1 >= 0.0 && x1 <= 1.0)) throw Error(ErrorCode::kInvalidParameter, "x1 must lie in [0, 1]");
  std::vector<ScalarExampleRow> rows;
  rows.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  double x = x1;
  for (int n = 1; n <= steps; ++n) {
    ScalarExampleRow r;
    r.n = n;
    r.x = x;
    const double s = x + 1.0 / n;
    r.u = x;
    r.z = 2.0 / 3.0 * s;
    r.w = -16.0 / 21.0 * s;
    r.y = std::clamp(116.0 / 210.0 * s, 0.0, 1.0);
    r.c_bound = 16.0 / 42.0 * s;
    r.d_bound = 5.0 / 6.0 * s;

    // [0, 1] ∩ {z <= c} ∩ {z <= d} ∩ {(x1 - x) z <= (x1 - x) x}
    double lo = 0.0;
    double hi = std::min({1.0, r.c_bound, r.d_bound});
    const double slope = x1 - x;
    if (slope > 0.0) hi = std::min(hi, x);
    if (slope < 0.0) lo = std::max(lo, x);
    if (lo > hi) throw Error(ErrorCode::kEmptySet, "reference recurrence: empty interval at n = " + std::to_string(n));
    r.x_next = std::clamp(x1, lo, hi);
    rows.push_back(r);
    x = r.x_next;
  }
  return rows;
}

ProblemInstance scalar_example_instance(double x1) {
  ParameterSchedules schedules;
  schedules.lambda = ScalarSchedule::constant(0.25);
  schedules.mu = ScalarSchedule::constant(0.25);
  schedules.error = ScalarSchedule::reciprocal(1.0, 0.0);
  return ProblemInstance{
      .ge = SpaceGeometry(1, 2.0),
      .gf = SpaceGeometry(1, 2.0),
      .a = Matrix::Constant(1, 1, -2.0),
      .m1 = MonotoneOp::scaling(2.0),
      .m2 = MonotoneOp::scaling(3.0),
      .c = ConvexSet::box(Vector::Zero(1), Vector::Ones(1)),
      .s = NonexpansiveMap::identity(),
      .family = WFamily::uniform(NonexpansiveMap::identity()),
      .schedules = schedules,
      .gamma = 0.1,
      .c_const = 1.0,
      .x1 = Vector::Constant(1, x1),
  };
}

double ExampleComparison::max_deviation() const { return std::max({u, z, w, y, c_bound, d_bound, x_next}); }

ExampleComparison compare_scalar_example(double x1, int steps) {
  const auto rows = scalar_example_recurrence(x1, steps);
  const ProblemInstance p = scalar_example_instance(x1);
  validate(p);
  ExampleComparison cmp;
  cmp.steps = steps;
  auto track = [](double& slot, double a, double b) { slot = std::max(slot, std::abs(a - b)); };
  // Each side follows its own trajectory; deviations therefore include any
  // accumulated drift.
  Vector x = p.x1;
  for (const auto& r : rows) {
    const IterateState st = step(p, r.n, x);
    track(cmp.u, st.u[0], r.u);
    track(cmp.z, st.z[0], r.z);
    track(cmp.w, st.w[0], r.w);
    track(cmp.y, st.y[0], r.y);
    const auto& cc = st.cuts[static_cast<int>(CutKind::kC)];
    const auto& cd = st.cuts[static_cast<int>(CutKind::kD)];
    track(cmp.c_bound, cc.b / cc.a[0], r.c_bound);
    track(cmp.d_bound, cd.b / cd.a[0], r.d_bound);
    track(cmp.x_next, st.x_next[0], r.x_next);
    x = st.x_next;
  }
  return cmp;
}

}  // namespace scnp
