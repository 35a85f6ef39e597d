#include "scnp/property_battery.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "scnp/convex_sets.hpp"
#include "scnp/monotone.hpp"
#include "scnp/problem_file.hpp"
#include "scnp/solver.hpp"
#include "scnp/wmapping.hpp"

namespace scnp {

namespace {

constexpr double kExponents[] = {1.5, 2.0, 3.0, 4.0};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  Vector vec(int dim, double scale = 1.0) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

class Tracker {
 public:
  Tracker(std::string name, double tol) { check_.name = std::move(name), check_.tolerance = tol; }

  void record(double violation) {
    ++check_.cases;
    if (!(violation <= check_.worst)) check_.worst = std::isnan(violation) ? INFINITY : violation;
  }

  PropertyCheck finish() {
    check_.passed = check_.worst <= check_.tolerance;
    return check_;
  }

 private:
  PropertyCheck check_;
};

// A random nonempty closed convex set together with a way to sample it.
struct RandomSet {
  ConvexSet set;
  std::function<Vector(Sampler&)> sample;
};

RandomSet random_set(Sampler& rng, int dim, double p) {
  switch (rng.integer(0, 3)) {
    case 0: {
      Vector lo(dim), hi(dim);
      for (int i = 0; i < dim; ++i) {
        lo[i] = rng.uniform(-1.0, 0.5);
        hi[i] = lo[i] + rng.uniform(0.1, 1.5);
      }
      return {ConvexSet::box(lo, hi), [lo, hi](Sampler& r) {
                Vector v(lo.size());
                for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = r.uniform(lo[i], hi[i]);
                return v;
              }};
    }
    case 1: {
      Vector a = rng.vec(dim);
      if (a.norm() < 0.1) a[0] += 1.0;
      const double b = rng.uniform(-0.5, 0.5);
      return {ConvexSet::halfspace(a, b), [a, b](Sampler& r) {
                Vector v = r.vec(static_cast<int>(a.size()), 2.0);
                const double excess = a.dot(v) - b;
                if (excess > 0.0) v -= (excess + r.uniform(0.0, 1.0)) * a / a.squaredNorm();
                return v;
              }};
    }
    case 2: {
      const double radius = rng.uniform(0.2, 1.5);
      const SpaceGeometry g(dim, p);
      return {ConvexSet::ball(Vector::Zero(dim), radius, p), [radius, g](Sampler& r) {
                Vector v = r.vec(g.dim());
                const double n = norm(v, g);
                if (n == 0.0) return v;
                return Vector(v * (radius * r.uniform(0.0, 1.0) / n));
              }};
    }
    default: {
      std::vector<Halfspace> cuts;
      // Both cuts contain the origin so the intersection is nonempty.
      for (int k = 0; k < 2; ++k) {
        Vector a = rng.vec(dim);
        if (a.norm() < 0.1) a[k % dim] += 1.0;
        cuts.push_back(Halfspace::make(a, rng.uniform(0.0, 0.5)));
      }
      ConvexSet s = ConvexSet::halfspaces(dim, cuts);
      return {s, [s, dim](Sampler& r) { return metric_projection(r.vec(dim, 2.0), s); }};
    }
  }
}

// Operator with a known null point.
struct RandomOperator {
  MonotoneOp op;
  Vector null_point;
};

RandomOperator random_operator(Sampler& rng, int dim, bool allow_indicator) {
  const int kind = rng.integer(0, allow_indicator ? 2 : 1);
  if (kind == 0) return {MonotoneOp::scaling(rng.uniform(0.0, 3.0)), Vector::Zero(dim)};
  if (kind == 1) {
    // B = V diag(d) V^T with the last eigenvalue zero; its eigenvector spans
    // part of the kernel.
    Matrix m = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    const Matrix v = qr.householderQ() * Matrix::Identity(dim, dim);
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d[i] = rng.uniform(0.1, 2.0);
    d[dim - 1] = 0.0;
    Matrix b = v * d.asDiagonal() * v.transpose();
    b = 0.5 * (b + b.transpose());
    return {MonotoneOp::linear_psd(b), v.col(dim - 1) * rng.uniform(-1.0, 1.0)};
  }
  Vector lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = rng.uniform(-1.0, 0.0);
    hi[i] = rng.uniform(0.0, 1.0);
  }
  Vector y(dim);
  for (int i = 0; i < dim; ++i) y[i] = rng.uniform(lo[i], hi[i]);
  return {MonotoneOp::indicator(ConvexSet::box(lo, hi)), y};
}

}  // namespace

std::vector<PropertyCheck> run_property_battery(const BatteryOptions& opts) {
  Sampler rng(opts.seed);
  const auto jmap = opts.duality ? opts.duality : [](const Vector& x, const SpaceGeometry& g) { return duality_map(x, g); };
  const int cases = opts.cases;
  std::vector<PropertyCheck> out;

  // --- duality map and phi ----------------------------------------------
  Tracker ident("duality_identities", 1e-10);
  Tracker round("duality_round_trip", 1e-10);
  Tracker sandwich("phi_sandwich", 1e-10);
  Tracker convexity("phi_dual_convexity", 1e-10);
  Tracker three_point("three_point_identity", 1e-10);
  for (double p : kExponents) {
    for (int c = 0; c < cases; ++c) {
      const int dim = rng.integer(1, 6);
      const SpaceGeometry g(dim, p);
      const Vector x = rng.vec(dim) * std::pow(10.0, rng.uniform(-1.0, 1.0));
      const Vector jx = jmap(x, g);
      const double nx = norm(x, g);
      ident.record(std::max(std::abs(x.dot(jx) - nx * nx) / std::max(1.0, nx * nx),
                            std::abs(dual_norm(jx, g) - nx) / std::max(1.0, nx)));
      const Vector xs = rng.vec(dim);
      const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
      round.record(std::max((inverse_duality_map(jx, g) - x).lpNorm<Eigen::Infinity>() / scale,
                            (jmap(inverse_duality_map(xs, g), g) - xs).lpNorm<Eigen::Infinity>()));

      const Vector u = rng.vec(dim), v = rng.vec(dim), t = rng.vec(dim), w = rng.vec(dim);
      const double nu = norm(u, g), nv = norm(v, g);
      const double f = phi(u, v, g);
      sandwich.record(std::max({0.0, (nu - nv) * (nu - nv) - f, f - (nu + nv) * (nu + nv)}));

      const double lambda = rng.uniform(0.0, 1.0);
      const Vector mix = inverse_duality_map(Vector(lambda * duality_map(u, g) + (1.0 - lambda) * duality_map(v, g)), g);
      convexity.record(std::max(0.0, phi(t, mix, g) - (lambda * phi(t, u, g) + (1.0 - lambda) * phi(t, v, g))));

      const double lhs = 2.0 * (u - v).dot(jmap(t, g) - jmap(w, g));
      const double rhs = phi(u, w, g) + phi(v, t, g) - phi(u, t, g) - phi(v, w, g);
      three_point.record(std::abs(lhs - rhs));
    }
  }
  out.push_back(ident.finish());
  out.push_back(round.finish());
  out.push_back(sandwich.finish());
  out.push_back(convexity.finish());
  out.push_back(three_point.finish());

  // --- generalized projections --------------------------------------------
  Tracker three_point_bound("projection_three_point_bound", 1e-8);
  Tracker variational("projection_variational_inequality", 1e-8);
  Tracker member("projection_membership", 1e-8);
  Tracker idem("projection_idempotence", 1e-9);
  for (double p : kExponents) {
    for (int c = 0; c < cases; ++c) {
      const int dim = rng.integer(1, 4);
      const SpaceGeometry g(dim, p);
      RandomSet rs = random_set(rng, dim, p);
      const Vector x = rng.vec(dim, 3.0);
      const Vector px = generalized_projection(x, rs.set, g);
      const Vector z = rs.sample(rng);
      three_point_bound.record(std::max(0.0, phi(z, px, g) + phi(px, x, g) - phi(z, x, g)));
      const Vector jgap = duality_map(x, g) - duality_map(px, g);
      double worst = 0.0;
      for (int k = 0; k < 4; ++k) worst = std::max(worst, (rs.sample(rng) - px).dot(jgap));
      variational.record(worst);
      // Violation of the defining constraints, measured like contains().
      double lo = 0.0, hi = 1.0;
      while (hi - lo > 1e-12 && hi > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (contains(rs.set, px, mid) ? hi : lo) = mid;
      }
      member.record(contains(rs.set, px, 0.0) ? 0.0 : hi);
      idem.record((generalized_projection(px, rs.set, g) - px).lpNorm<Eigen::Infinity>());
    }
  }
  out.push_back(three_point_bound.finish());
  out.push_back(variational.finish());
  out.push_back(member.finish());
  out.push_back(idem.finish());

  // --- resolvents ----------------------------------------------------------
  Tracker resolvent_ineq("resolvent_inequality", 1e-8);
  Tracker residual("resolvent_residual", 1e-8);
  Tracker fixing("resolvent_fixes_null_points", 1e-8);
  Tracker obtuse("resolvent_obtuse_angle_p2", 1e-8);
  Tracker monotone("operator_monotonicity", 1e-10);
  for (double p : kExponents) {
    for (int c = 0; c < cases; ++c) {
      const int dim = rng.integer(1, 4);
      const SpaceGeometry g(dim, p);
      const RandomOperator ro = random_operator(rng, dim, true);
      const double r = rng.uniform(0.1, 2.0);
      const Vector x = rng.vec(dim, 2.0);
      const Vector u = generalized_resolvent(ro.op, r, x, g);
      resolvent_ineq.record(std::max(0.0, phi(ro.null_point, u, g) + phi(u, x, g) - phi(ro.null_point, x, g)));
      fixing.record((generalized_resolvent(ro.op, r, ro.null_point, g) - ro.null_point).lpNorm<Eigen::Infinity>());
      if (ro.op.is_single_valued()) {
        residual.record(resolvent_residual(ro.op, r, x, u, g));
        const Vector y = rng.vec(dim, 2.0);
        monotone.record(std::max(0.0, -(x - y).dot(eval(ro.op, x) - eval(ro.op, y))));
      }
      if (p == 2.0) obtuse.record(std::max(0.0, -(u - ro.null_point).dot(x - u)));
    }
  }
  out.push_back(resolvent_ineq.finish());
  out.push_back(residual.finish());
  out.push_back(fixing.finish());
  out.push_back(obtuse.finish());
  out.push_back(monotone.finish());

  // --- W-mappings (p = 2) ---------------------------------------------------
  Tracker wne("wmap_nonexpansive", 0.0);
  Tracker wfix("wmap_fixed_point", 1e-12);
  for (int c = 0; c < cases; ++c) {
    const int dim = rng.integer(1, 4);
    const int depth = rng.integer(1, 10);
    const Vector z = rng.vec(dim);
    std::vector<NonexpansiveMap> maps;
    std::vector<double> lambdas;
    for (int i = 0; i < depth; ++i) {
      Matrix q(dim, dim);
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) q(a, b) = rng.uniform(-1.0, 1.0);
      }
      Eigen::JacobiSVD<Matrix> svd(q);
      q /= std::max(1.0, svd.singularValues()[0] * (1.0 + 1e-9));
      maps.push_back(NonexpansiveMap::affine(q, z - q * z));
      lambdas.push_back(rng.uniform(0.05, 0.9));
    }
    const WFamily fam(maps, lambdas, 0.9);
    const int n = rng.integer(1, depth);
    const Vector x = rng.vec(dim, 2.0), y = rng.vec(dim, 2.0);
    wne.record(std::max(0.0, (apply_wn(fam, n, x) - apply_wn(fam, n, y)).norm() - (x - y).norm() * (1.0 + 1e-10)));
    wfix.record((apply_wn(fam, n, z) - z).lpNorm<Eigen::Infinity>());
  }
  out.push_back(wne.finish());
  out.push_back(wfix.finish());

  // --- solver structure on random box SFP instances (p = 2) -----------------
  Tracker contain("solver_cuts_contain_solution", 1e-8);
  Tracker feas("solver_next_iterate_feasible", 1e-8);
  Tracker lyap("solver_lyapunov_monotone", 1e-10);
  const int instances = std::max(1, cases / 100);
  for (int k = 0; k < instances; ++k) {
    const ProblemInstance p = random_box_sfp(rng.engine()(), 5, 3);
    Vector x = p.x1;
    for (int n = 1; n <= 100; ++n) {
      const IterateState st = step(p, n, x);
      double worst_sol = 0.0, worst_next = contains(p.c, st.x_next, 1e-8) ? 0.0 : 1.0;
      for (const auto& cut : st.cuts) {
        worst_sol = std::max(worst_sol, -cut.b);  // the solution is the origin
        worst_next = std::max(worst_next, cut.a.dot(st.x_next) - cut.b);
      }
      contain.record(worst_sol);
      feas.record(worst_next);
      lyap.record(std::max(0.0, st.diag.phi_x1 - phi(st.x_next, p.x1, p.ge)));
      x = st.x_next;
    }
  }
  out.push_back(contain.finish());
  out.push_back(feas.finish());
  out.push_back(lyap.finish());
  return out;
}

ProblemInstance random_box_sfp(std::uint64_t seed, int rows, int cols) {
  const Matrix a = seeded_matrix(rows, cols, seed, 1.0);
  const ConvexSet c = ConvexSet::box(Vector::Constant(cols, -1.0), Vector::Constant(cols, 1.0));
  const ConvexSet q = ConvexSet::box(Vector::Constant(rows, -0.2), Vector::Constant(rows, 0.2));
  Eigen::JacobiSVD<Matrix> svd(a);
  const double an = svd.singularValues()[0];
  // x1 from the same seed, in the upper corner of C so it is not a solution.
  const Matrix corner = seeded_matrix(cols, 1, seed ^ 0x9e3779b97f4a7c15ULL, 0.5);
  const Vector x1 = (corner.col(0).array().abs() + 0.5).matrix();
  return make_sfp_instance(c, q, a, NonexpansiveMap::identity(), WFamily::uniform(NonexpansiveMap::identity()),
                           ParameterSchedules{}, 1.0 / (an * an), x1);
}

std::string format_report(const std::vector<PropertyCheck>& checks) {
  std::string out = fmt::format("{:<36} {:>6} {:>8} {:>12} {:>10}\n", "check", "status", "cases", "worst", "tol");
  for (const auto& c : checks) {
    out += fmt::format("{:<36} {:>6} {:>8} {:>12.3e} {:>10.1e}\n", c.name, c.passed ? "PASS" : "FAIL", c.cases,
                       c.worst, c.tolerance);
  }
  const auto failed = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; });
  out += fmt::format("{} checks, {} failed\n", checks.size(), failed);
  return out;
}

bool all_passed(const std::vector<PropertyCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

}  // namespace scnp
