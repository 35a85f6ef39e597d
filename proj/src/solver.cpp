#include "scnp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "scnp/error.hpp"

namespace scnp {

// ---------------------------------------------------------------------------
// Schedules

ScalarSchedule ScalarSchedule::constant(double c) {
  if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidParameter, "constant schedule is not finite");
  ScalarSchedule s;
  s.rule_ = Rule::kConstant;
  s.value_ = c;
  return s;
}

ScalarSchedule ScalarSchedule::reciprocal(double scale, double offset) {
  if (!std::isfinite(scale) || !std::isfinite(offset) || offset <= -1.0) {
    throw Error(ErrorCode::kInvalidParameter, "reciprocal schedule needs finite scale and offset > -1");
  }
  ScalarSchedule s;
  s.rule_ = Rule::kReciprocal;
  s.scale_ = scale;
  s.offset_ = offset;
  return s;
}

ScalarSchedule ScalarSchedule::ratio(double offset) {
  if (!std::isfinite(offset) || offset <= -1.0) {
    throw Error(ErrorCode::kInvalidParameter, "ratio schedule needs offset > -1");
  }
  ScalarSchedule s;
  s.rule_ = Rule::kRatio;
  s.offset_ = offset;
  return s;
}

ScalarSchedule ScalarSchedule::explicit_values(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidParameter, "explicit schedule needs at least one value");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidParameter, "explicit schedule value is not finite");
  }
  ScalarSchedule s;
  s.rule_ = Rule::kExplicit;
  s.values_ = std::move(values);
  return s;
}

double ScalarSchedule::at(int n) const {
  const double nn = static_cast<double>(n);
  switch (rule_) {
    case Rule::kConstant: return value_;
    case Rule::kReciprocal: return scale_ / (nn + offset_);
    case Rule::kRatio: return nn / (nn + offset_);
    case Rule::kExplicit: {
      const auto idx = std::min(static_cast<std::size_t>(std::max(n, 1) - 1), values_.size() - 1);
      return values_[idx];
    }
  }
  return 0.0;
}

Vector ParameterSchedules::error_at(int n, int dim) const {
  const double e = error.at(n);
  if (error_direction.size() == 0) return Vector::Constant(dim, e);
  if (error_direction.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "error direction does not match dim E");
  }
  return e * error_direction;
}

void ParameterSchedules::check(int n) const {
  auto fail = [n](const std::string& what) {
    throw Error(ErrorCode::kInvalidParameter, what + " violated at n = " + std::to_string(n));
  };
  if (!(floor > 0.0)) fail("floor a > 0");
  const double a = alpha.at(n);
  const double s = sigma.at(n);
  if (!(a > 0.0 && a < 1.0)) fail("alpha_n in (0, 1)");
  if (!(s > 0.0 && s < 1.0)) fail("sigma_n in (0, 1)");
  if (!(lambda.at(n) >= floor)) fail("lambda_n >= a");
  if (!(mu.at(n) >= floor)) fail("mu_n >= a");
  if (!std::isfinite(error.at(n))) fail("finite e_n");
}

// ---------------------------------------------------------------------------
// Validation

double operator_norm_bound(const Matrix& a, const SpaceGeometry& ge, const SpaceGeometry& gf) {
  if (a.size() == 0) return 0.0;
  if (ge.is_hilbert() && gf.is_hilbert()) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()[0];
  }
  const double one = a.cwiseAbs().colwise().sum().maxCoeff();
  const double inf = a.cwiseAbs().rowwise().sum().maxCoeff();
  return std::max(one, inf);
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Vector> sample_points(const ConvexSet& c, const SpaceGeometry& g, const Vector& anchor, int count) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const auto* box = std::get_if<Box>(&c.variant());
  const double scale = 1.0 + anchor.lpNorm<Eigen::Infinity>();
  for (int k = 0; k < count; ++k) {
    Vector v(g.dim());
    if (box != nullptr) {
      for (int i = 0; i < g.dim(); ++i) v[i] = box->lo[i] + unit_uniform(rng) * (box->hi[i] - box->lo[i]);
    } else {
      for (int i = 0; i < g.dim(); ++i) v[i] = anchor[i] + scale * (2.0 * unit_uniform(rng) - 1.0);
      v = generalized_projection(v, c, g);
    }
    out.push_back(std::move(v));
  }
  return out;
}

void check_nonexpansive(const NonexpansiveMap& t, const std::vector<Vector>& pts, const SpaceGeometry& g,
                        const ConvexSet* into, const std::string& name) {
  std::vector<Vector> images;
  images.reserve(pts.size());
  for (const auto& x : pts) {
    images.push_back(t.apply(x));
    if (into != nullptr && !contains(*into, images.back(), 1e-8)) {
      throw Error(ErrorCode::kInvalidParameter, name + " does not map C into C");
    }
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const std::size_t j = i + 1;
    const double lhs = norm(Vector(images[i] - images[j]), g);
    const double rhs = norm(Vector(pts[i] - pts[j]), g);
    if (lhs > rhs * (1.0 + 1e-10) + 1e-14) throw Error(ErrorCode::kInvalidParameter, name + " is not nonexpansive");
  }
}

}  // namespace

void validate(const ProblemInstance& p) {
  const int de = p.ge.dim();
  const int df = p.gf.dim();
  if (p.a.rows() != df || p.a.cols() != de) {
    throw Error(ErrorCode::kDimensionMismatch, "A must be dim F x dim E");
  }
  if (!p.a.allFinite()) throw Error(ErrorCode::kInvalidParameter, "A is not finite");
  if (p.a.isZero(0.0)) throw Error(ErrorCode::kInvalidParameter, "A must be nonzero");
  if (p.c.dim() != de) throw Error(ErrorCode::kDimensionMismatch, "C must live in E");
  if (std::holds_alternative<Ball>(p.c.variant())) {
    throw Error(ErrorCode::kInvalidParameter, "C must be the full space, a box or a polyhedron");
  }
  require_conforms(p.x1, p.ge, "x1");
  if (!(p.c_const > 0.0) || !std::isfinite(p.c_const)) throw Error(ErrorCode::kInvalidParameter, "c must be > 0");
  const double an = operator_norm_bound(p.a, p.ge, p.gf);
  const double gamma_max = 2.0 / (p.c_const * an * an);
  if (!(p.gamma > 0.0 && p.gamma < gamma_max)) {
    throw Error(ErrorCode::kInvalidParameter,
                "gamma must satisfy 0 < gamma < 2 / (c |A|^2) = " + std::to_string(gamma_max));
  }
  if (!contains(p.c, p.x1, 1e-10)) throw Error(ErrorCode::kInvalidParameter, "x1 must lie in C");
  p.schedules.check(1);
  if (p.schedules.error_direction.size() != 0 && p.schedules.error_direction.size() != de) {
    throw Error(ErrorCode::kDimensionMismatch, "error direction does not match dim E");
  }
  auto check_op_dim = [](const MonotoneOp& m, int dim, const char* name) {
    if (const auto* l = std::get_if<LinearPSD>(&m.variant()); l != nullptr && l->b.rows() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, std::string(name) + " has the wrong dimension");
    }
    if (const auto* i = std::get_if<IndicatorSubdifferential>(&m.variant()); i != nullptr && i->set.dim() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, std::string(name) + " set has the wrong dimension");
    }
  };
  check_op_dim(p.m1, de, "M1");
  check_op_dim(p.m2, df, "M2");

  const auto pts = sample_points(p.c, p.ge, p.x1, 16);
  check_nonexpansive(p.s, pts, p.ge, nullptr, "S");
  for (int i = 0; i < p.family.depth(); ++i) {
    check_nonexpansive(p.family.maps()[static_cast<std::size_t>(i)], pts, p.ge, &p.c,
                       "T_" + std::to_string(i + 1));
  }
}

ProblemInstance make_sfp_instance(const ConvexSet& c, const ConvexSet& q, const Matrix& a, const NonexpansiveMap& s,
                                  const WFamily& family, const ParameterSchedules& schedules, double gamma,
                                  const Vector& x1, double p_e, double p_f, double c_const) {
  return ProblemInstance{
      .ge = SpaceGeometry(c.dim(), p_e),
      .gf = SpaceGeometry(q.dim(), p_f),
      .a = a,
      .m1 = MonotoneOp::indicator(c),
      .m2 = MonotoneOp::indicator(q),
      .c = c,
      .s = s,
      .family = family,
      .schedules = schedules,
      .gamma = gamma,
      .c_const = c_const,
      .x1 = x1,
  };
}

// ---------------------------------------------------------------------------
// Cuts

Halfspace build_cut_c(const Vector& z_n, const Vector& w_n, const Matrix& a, const SpaceGeometry& gf) {
  const Vector jd = duality_map(Vector(a * z_n - w_n), gf);
  Vector normal = a.transpose() * jd;
  double rhs = w_n.dot(jd);
  // A^T J_F d = 0 with d != 0 leaves 0 <= <w_n, J_F d>, which is exact zero
  // up to round-off whenever the problem is consistent.
  if (normal.isZero(0.0) && rhs < 0.0 && rhs > -1e-12 * std::max(1.0, w_n.norm() * jd.norm())) rhs = 0.0;
  return Halfspace::make(std::move(normal), rhs);
}

Halfspace build_cut_d(const Vector& z_n, const Vector& v, const SpaceGeometry& ge) {
  Vector normal = 2.0 * (duality_map(v, ge) - duality_map(z_n, ge));
  const double nv = norm(v, ge);
  const double nz = norm(z_n, ge);
  double rhs = nv * nv - nz * nz;
  // J is injective, so a zero normal means v = z_n and the set is all of E.
  if (normal.isZero(0.0)) rhs = std::max(rhs, 0.0);
  return Halfspace::make(std::move(normal), rhs);
}

Halfspace build_cut_q(const Vector& x_n, const Vector& x1, const SpaceGeometry& ge) {
  Vector normal = duality_map(x1, ge) - duality_map(x_n, ge);
  const double rhs = normal.dot(x_n);
  return Halfspace::make(std::move(normal), rhs);
}

// ---------------------------------------------------------------------------
// Iteration

IterateState step(const ProblemInstance& p, int n, const Vector& x_n) {
  const SpaceGeometry& ge = p.ge;
  const SpaceGeometry& gf = p.gf;
  p.schedules.check(n);
  const double alpha = p.schedules.alpha.at(n);
  const double sigma = p.schedules.sigma.at(n);

  IterateState st;
  st.n = n;
  st.x = x_n;

  const Vector wx = apply_wn(p.family, std::min(n, p.family.depth()), x_n);
  const Vector sx = p.s.apply(x_n);
  const Vector jx = duality_map(x_n, ge);
  const Vector mixed = inverse_duality_map(Vector(sigma * duality_map(wx, ge) + (1.0 - sigma) * duality_map(sx, ge)), ge);
  const Vector projected = generalized_projection(mixed, p.c, ge);
  st.u = inverse_duality_map(Vector((1.0 - alpha) * jx + alpha * duality_map(projected, ge)), ge);

  const Vector v = st.u + p.schedules.error_at(n, ge.dim());
  st.z = generalized_resolvent(p.m1, p.schedules.lambda.at(n), v, ge);
  const Vector az = p.a * st.z;
  st.w = generalized_resolvent(p.m2, p.schedules.mu.at(n), az, gf);

  const Vector jd = duality_map(Vector(az - st.w), gf);
  const Vector backward = inverse_duality_map(Vector(duality_map(st.z, ge) - p.gamma * (p.a.transpose() * jd)), ge);
  st.y = generalized_projection(backward, p.c, ge);

  st.cuts[static_cast<int>(CutKind::kC)] = build_cut_c(st.z, st.w, p.a, gf);
  st.cuts[static_cast<int>(CutKind::kD)] = build_cut_d(st.z, v, ge);
  st.cuts[static_cast<int>(CutKind::kQ)] = build_cut_q(x_n, p.x1, ge);

  try {
    st.x_next = project_halfspace_intersection(p.x1, st.cuts, p.c, ge);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptySet) throw;
    std::string detail = "iteration " + std::to_string(n) + ": C_n ∩ D_n ∩ Q_n ∩ C is empty;";
    const char* names[] = {"C_n", "D_n", "Q_n"};
    for (int k = 0; k < 3; ++k) {
      std::string coeffs;
      for (double c : st.cuts[static_cast<std::size_t>(k)].a) coeffs += (coeffs.empty() ? "" : ",") + std::to_string(c);
      detail += std::string(" ") + names[k] + ": <(" + coeffs + "), z> <= " +
                std::to_string(st.cuts[static_cast<std::size_t>(k)].b) + ";";
    }
    throw Error(ErrorCode::kEmptySet, detail);
  }

  st.diag.step_norm = norm(Vector(st.x_next - x_n), ge);
  st.diag.split_residual = norm(Vector(az - st.w), gf);
  st.diag.fix_residual = norm(Vector(x_n - wx), ge);
  st.diag.phi_x1 = phi(x_n, p.x1, ge);
  st.diag.cond2_ratio = dual_norm(Vector(jx - duality_map(st.u, ge)), ge) / alpha;
  st.diag.y_residual = norm(Vector(x_n - st.y), ge);
  return st;
}

RunResult run(const ProblemInstance& p, const StoppingRule& stop,
              const std::function<void(const IterateState&)>& observer) {
  validate(p);
  if (stop.max_iters < 1) throw Error(ErrorCode::kInvalidParameter, "max_iters must be >= 1");
  RunResult result;
  Vector x = p.x1;
  for (int n = 1; n <= stop.max_iters; ++n) {
    if (!(norm(x, p.ge) <= stop.divergence_guard)) {
      throw Error(ErrorCode::kDiverged, "|x_" + std::to_string(n) + "| exceeds the divergence guard");
    }
    IterateState st = step(p, n, x);
    if (observer) observer(st);
    x = st.x_next;
    const bool done = st.diag.step_norm <= stop.tol;
    result.states.push_back(std::move(st));
    if (done) {
      result.status = RunStatus::kConverged;
      return result;
    }
  }
  result.status = RunStatus::kBudgetExhausted;
  return result;
}

}  // namespace scnp
