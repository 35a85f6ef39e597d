#include "scnp/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "newton.hpp"
#include "overloaded.hpp"
#include "scnp/error.hpp"

namespace scnp {

namespace {

using detail::overloaded;

void require_dim(const Vector& v, int dim, const char* what) {
  if (v.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has " + std::to_string(v.size()) +
                                                   " entries, expected " + std::to_string(dim));
  }
  if (!v.allFinite()) throw Error(ErrorCode::kInvalidParameter, std::string(what) + " is not finite");
}

double lp(const Vector& v, double p) { return norm(v, SpaceGeometry(static_cast<int>(v.size()), p)); }

// A halfspace row scaled to a unit Euclidean normal, so residuals are
// distances.
struct Row {
  Vector a;
  double b;
};

Row normalized(const Halfspace& h) {
  const double s = h.a.norm();
  return {h.a / s, h.b / s};
}

// ---------------------------------------------------------------------------
// Box, any p. With N = |y|_p fixed, the optimality conditions decouple:
// y_i = clamp(sign(x*_i) |x*_i|^(1/(p-1)) N^((p-2)/(p-1)), lo_i, hi_i).
// |y(N)|_p / N is strictly decreasing, so N is the unique root of
// |y(N)|_p / N = 1.
Vector box_projection(const Vector& x, const Box& box, const SpaceGeometry& g) {
  if (g.is_hilbert()) return x.cwiseMax(box.lo).cwiseMin(box.hi);

  const double p = g.p();
  const Vector xs = duality_map(x, g);
  const Vector origin = Vector::Zero(x.size()).cwiseMax(box.lo).cwiseMin(box.hi);
  if (xs.isZero(0.0)) return origin;

  const double kappa = (p - 2.0) / (p - 1.0);
  Vector base(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    base[i] = std::copysign(std::pow(std::abs(xs[i]), 1.0 / (p - 1.0)), xs[i]);
  }
  auto candidate = [&](double n) -> Vector {
    return (base * std::pow(n, kappa)).cwiseMax(box.lo).cwiseMin(box.hi);
  };
  auto excess = [&](double log_n) {
    const double n = std::exp(log_n);
    return lp(candidate(n), p) / n - 1.0;
  };

  double lo = std::log(std::max(norm(x, g), 1e-300));
  double hi = lo;
  double f_lo = excess(lo);
  double f_hi = f_lo;
  constexpr double kMinLog = -690.0;
  constexpr double kMaxLog = 690.0;
  if (f_lo > 0.0) {
    while (f_hi > 0.0) {
      hi += std::log(2.0);
      if (hi > kMaxLog) throw Error(ErrorCode::kNoConvergence, "box projection: norm bracket overflow");
      f_hi = excess(hi);
    }
  } else {
    while (f_lo <= 0.0) {
      lo -= std::log(2.0);
      if (lo < kMinLog) return candidate(std::exp(kMinLog));
      f_lo = excess(lo);
    }
  }
  if (f_hi == 0.0) return candidate(std::exp(hi));
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      excess, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 200) throw Error(ErrorCode::kNoConvergence, "box projection: root finder budget exhausted");
  return candidate(std::exp(0.5 * (bracket.first + bracket.second)));
}

Vector ball_projection(const Vector& x, const Ball& ball, const SpaceGeometry& g) {
  if (g.is_hilbert() && ball.exponent == 2.0) {
    const Vector d = x - ball.center;
    const double dist = d.norm();
    if (dist <= ball.radius) return x;
    return ball.center + d * (ball.radius / dist);
  }
  if (ball.exponent == g.p() && ball.center.isZero(0.0)) {
    const double n = norm(x, g);
    if (n <= ball.radius) return x;
    return x * (ball.radius / n);
  }
  throw Error(ErrorCode::kInvalidParameter,
              "generalized projection onto this ball is only supported for p = 2 or an origin-centred "
              "ball whose exponent matches p");
}

// ---------------------------------------------------------------------------
// phi-projection of x onto the affine set {y : G y = h}, G with full row rank
// and unit rows.
Vector affine_projection(const Vector& x, const Matrix& gm, const Vector& h, const SpaceGeometry& g,
                         const ProjectionOptions& opts) {
  const auto k = gm.rows();
  const auto n = gm.cols();
  if (k == 0) return x;
  if (g.is_hilbert()) {
    const Vector lambda = (gm * gm.transpose()).ldlt().solve(gm * x - h);
    return x - gm.transpose() * lambda;
  }
  if (k == n) return gm.fullPivLu().solve(h);

  detail::NewtonOptions nopts;
  nopts.max_iters = opts.max_newton_iters;
  const Vector xs = duality_map(x, g);
  nopts.grad_tol = 1e-13 * std::max({1.0, x.lpNorm<Eigen::Infinity>(), xs.lpNorm<Eigen::Infinity>()});

  if (g.p() < 2.0) {
    // Dual route: the multiplier problem is smooth because q > 2.
    const SpaceGeometry dual = g.dual();
    detail::SmoothObjective obj;
    obj.value = [&](const Vector& lam) {
      const double nv = norm(Vector(xs - gm.transpose() * lam), dual);
      return 0.5 * nv * nv + h.dot(lam);
    };
    obj.gradient = [&](const Vector& lam) -> Vector {
      return h - gm * duality_map(Vector(xs - gm.transpose() * lam), dual);
    };
    obj.hessian = [&](const Vector& lam) -> Matrix {
      return gm * duality_jacobian(xs - gm.transpose() * lam, dual.p()) * gm.transpose();
    };
    const auto res = detail::newton_minimize(obj, Vector::Zero(k), nopts);
    if (!res.converged) {
      throw Error(ErrorCode::kNoConvergence, "affine phi-projection (dual Newton) residual " +
                                                 std::to_string(res.residual));
    }
    return inverse_duality_map(Vector(xs - gm.transpose() * res.x), g);
  }

  // Primal route on the null space of G: smooth because p > 2.
  Eigen::HouseholderQR<Matrix> qr(gm.transpose());
  const Matrix q_full = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix z = q_full.rightCols(n - k);
  const Vector y0 = gm.transpose() * (gm * gm.transpose()).ldlt().solve(h);
  detail::SmoothObjective obj;
  obj.value = [&](const Vector& t) {
    const Vector y = y0 + z * t;
    const double ny = norm(y, g);
    return 0.5 * ny * ny - y.dot(xs);
  };
  obj.gradient = [&](const Vector& t) -> Vector {
    return z.transpose() * (duality_map(Vector(y0 + z * t), g) - xs);
  };
  obj.hessian = [&](const Vector& t) -> Matrix {
    return z.transpose() * duality_jacobian(y0 + z * t, g.p()) * z;
  };
  const auto res = detail::newton_minimize(obj, z.transpose() * (x - y0), nopts);
  if (!res.converged) {
    throw Error(ErrorCode::kNoConvergence, "affine phi-projection (primal Newton) residual " +
                                               std::to_string(res.residual));
  }
  return y0 + z * res.x;
}

// phi(y, x) up to the constant |x|^2; for p = 2 the squared distance.
double projection_objective(const Vector& y, const Vector& x, const Vector& xs, const SpaceGeometry& g) {
  if (g.is_hilbert()) return (y - x).squaredNorm();
  const double ny = norm(y, g);
  return ny * ny - 2.0 * y.dot(xs);
}

bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

void append_base_groups(const ConvexSet& base, int dim, std::vector<std::vector<Row>>& groups,
                        std::vector<Row>& all_rows) {
  std::visit(overloaded{
                 [&](const FullSpace&) {},
                 [&](const Box& box) {
                   for (int i = 0; i < dim; ++i) {
                     Vector e = Vector::Zero(dim);
                     e[i] = 1.0;
                     Row lo{-e, -box.lo[i]};
                     Row hi{e, box.hi[i]};
                     all_rows.push_back(lo);
                     all_rows.push_back(hi);
                     if (box.lo[i] == box.hi[i]) {
                       groups.push_back({hi});
                     } else {
                       groups.push_back({lo, hi});
                     }
                   }
                 },
                 [&](const HalfspaceIntersection& hs) {
                   for (const auto& h : hs.cuts) {
                     if (h.is_full_space()) continue;
                     const Row r = normalized(h);
                     all_rows.push_back(r);
                     groups.push_back({r});
                   }
                 },
                 [&](const IntersectionWith& iw) {
                   append_base_groups(*iw.base, dim, groups, all_rows);
                   for (const auto& h : iw.cuts) {
                     if (h.is_full_space()) continue;
                     const Row r = normalized(h);
                     all_rows.push_back(r);
                     groups.push_back({r});
                   }
                 },
                 [&](const Ball&) {
                   throw Error(ErrorCode::kInvalidParameter,
                               "halfspace-intersection projection needs a full-space, box or polyhedral base");
                 },
             },
             base.variant());
}

}  // namespace

// ---------------------------------------------------------------------------

Halfspace Halfspace::make(Vector a, double b) {
  if (!a.allFinite() || !std::isfinite(b)) throw Error(ErrorCode::kInvalidParameter, "halfspace is not finite");
  if (a.isZero(0.0) && b < 0.0) throw Error(ErrorCode::kEmptySet, "halfspace 0 <= b with b < 0");
  return Halfspace{std::move(a), b};
}

ConvexSet ConvexSet::full_space(int dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidParameter, "dimension must be >= 1");
  return ConvexSet(FullSpace{dim});
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.size() < 1) throw Error(ErrorCode::kInvalidParameter, "box dimension must be >= 1");
  require_dim(hi, static_cast<int>(lo.size()), "box upper bound");
  if (!lo.allFinite()) throw Error(ErrorCode::kInvalidParameter, "box lower bound is not finite");
  if ((lo.array() > hi.array()).any()) throw Error(ErrorCode::kInvalidParameter, "box requires lo <= hi");
  return ConvexSet(Box{std::move(lo), std::move(hi)});
}

ConvexSet ConvexSet::ball(Vector center, double radius, double exponent) {
  if (center.size() < 1) throw Error(ErrorCode::kInvalidParameter, "ball dimension must be >= 1");
  if (!center.allFinite() || !std::isfinite(radius) || radius < 0.0) {
    throw Error(ErrorCode::kInvalidParameter, "ball needs a finite centre and radius >= 0");
  }
  if (!std::isfinite(exponent) || exponent <= 1.0) {
    throw Error(ErrorCode::kInvalidParameter, "ball exponent must exceed 1");
  }
  return ConvexSet(Ball{std::move(center), radius, exponent});
}

ConvexSet ConvexSet::halfspace(Vector a, double b) {
  const int dim = static_cast<int>(a.size());
  return halfspaces(dim, {Halfspace::make(std::move(a), b)});
}

ConvexSet ConvexSet::halfspaces(int dim, std::vector<Halfspace> cuts) {
  if (dim < 1) throw Error(ErrorCode::kInvalidParameter, "dimension must be >= 1");
  for (const auto& c : cuts) {
    require_dim(c.a, dim, "halfspace normal");
    if (c.is_full_space() && c.b < 0.0) throw Error(ErrorCode::kEmptySet, "halfspace 0 <= b with b < 0");
  }
  return ConvexSet(HalfspaceIntersection{dim, std::move(cuts)});
}

ConvexSet ConvexSet::intersect(ConvexSet base, std::vector<Halfspace> cuts) {
  const int dim = base.dim();
  for (const auto& c : cuts) {
    require_dim(c.a, dim, "halfspace normal");
    if (c.is_full_space() && c.b < 0.0) throw Error(ErrorCode::kEmptySet, "halfspace 0 <= b with b < 0");
  }
  return ConvexSet(IntersectionWith{std::make_shared<const ConvexSet>(std::move(base)), std::move(cuts)});
}

int ConvexSet::dim() const {
  return std::visit(overloaded{
                        [](const FullSpace& s) { return s.dim; },
                        [](const Box& s) { return static_cast<int>(s.lo.size()); },
                        [](const Ball& s) { return static_cast<int>(s.center.size()); },
                        [](const HalfspaceIntersection& s) { return s.dim; },
                        [](const IntersectionWith& s) { return s.base->dim(); },
                    },
                    v_);
}

bool contains(const ConvexSet& s, const Vector& x, double tol) {
  require_dim(x, s.dim(), "point");
  auto in_cuts = [&](const std::vector<Halfspace>& cuts) {
    return std::all_of(cuts.begin(), cuts.end(), [&](const Halfspace& h) { return h.a.dot(x) <= h.b + tol; });
  };
  return std::visit(overloaded{
                        [](const FullSpace&) { return true; },
                        [&](const Box& b) {
                          return ((b.lo.array() - tol) <= x.array()).all() &&
                                 (x.array() <= (b.hi.array() + tol)).all();
                        },
                        [&](const Ball& b) { return lp(Vector(x - b.center), b.exponent) <= b.radius + tol; },
                        [&](const HalfspaceIntersection& h) { return in_cuts(h.cuts); },
                        [&](const IntersectionWith& iw) { return contains(*iw.base, x, tol) && in_cuts(iw.cuts); },
                    },
                    s.variant());
}

Vector generalized_projection(const Vector& x, const ConvexSet& s, const SpaceGeometry& g,
                              const ProjectionOptions& opts) {
  require_conforms(x, g, "point");
  if (s.dim() != g.dim()) throw Error(ErrorCode::kDimensionMismatch, "set and geometry dimensions differ");
  return std::visit(overloaded{
                        [&](const FullSpace&) -> Vector { return x; },
                        [&](const Box& b) { return box_projection(x, b, g); },
                        [&](const Ball& b) { return ball_projection(x, b, g); },
                        [&](const HalfspaceIntersection& h) {
                          return project_halfspace_intersection(x, h.cuts, ConvexSet::full_space(g.dim()), g,
                                                                opts);
                        },
                        [&](const IntersectionWith& iw) {
                          return project_halfspace_intersection(x, iw.cuts, *iw.base, g, opts);
                        },
                    },
                    s.variant());
}

Vector metric_projection(const Vector& x, const ConvexSet& s) {
  return generalized_projection(x, s, SpaceGeometry(s.dim(), 2.0));
}

Vector project_halfspace_intersection(const Vector& x, std::span<const Halfspace> cuts, const ConvexSet& base,
                                      const SpaceGeometry& g, const ProjectionOptions& opts) {
  require_conforms(x, g, "point");
  const int dim = g.dim();
  if (base.dim() != dim) throw Error(ErrorCode::kDimensionMismatch, "base set and geometry dimensions differ");

  std::vector<std::vector<Row>> groups;
  std::vector<Row> rows;
  append_base_groups(base, dim, groups, rows);
  for (const auto& h : cuts) {
    require_dim(h.a, dim, "cut normal");
    if (h.is_full_space()) {
      if (h.b < 0.0) throw Error(ErrorCode::kEmptySet, "degenerate cut 0 <= b with b < 0");
      continue;
    }
    const Row r = normalized(h);
    rows.push_back(r);
    groups.push_back({r});
  }

  auto feasible = [&](const Vector& y) {
    return std::all_of(rows.begin(), rows.end(), [&](const Row& r) { return r.a.dot(y) - r.b <= opts.tol; });
  };
  if (feasible(x)) return x;

  // Enumerate every choice of at most one active face per group, smallest
  // active sets first.
  long total = 1;
  for (const auto& grp : groups) {
    total *= static_cast<long>(grp.size() + 1);
    if (total > opts.max_active_sets) {
      throw Error(ErrorCode::kInvalidParameter, "too many constraints for active-set enumeration");
    }
  }
  std::vector<std::vector<int>> choices;
  choices.reserve(static_cast<std::size_t>(total));
  std::vector<int> counter(groups.size(), 0);
  for (long c = 0; c < total; ++c) {
    choices.push_back(counter);
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (++counter[j] <= static_cast<int>(groups[j].size())) break;
      counter[j] = 0;
    }
  }
  auto cardinality = [](const std::vector<int>& ch) {
    return static_cast<int>(std::count_if(ch.begin(), ch.end(), [](int v) { return v != 0; }));
  };
  std::stable_sort(choices.begin(), choices.end(),
                   [&](const auto& a, const auto& b) { return cardinality(a) < cardinality(b); });

  const Vector xs = g.is_hilbert() ? x : duality_map(x, g);
  std::optional<Vector> best;
  double best_value = std::numeric_limits<double>::infinity();
  int best_card = 0;
  for (const auto& ch : choices) {
    const int k = cardinality(ch);
    if (k > dim) break;
    Matrix gm(k, dim);
    Vector h(k);
    int row = 0;
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (ch[j] == 0) continue;
      const Row& r = groups[j][static_cast<std::size_t>(ch[j] - 1)];
      gm.row(row) = r.a.transpose();
      h[row] = r.b;
      ++row;
    }
    if (k > 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(gm);
      qr.setThreshold(1e-10);
      if (qr.rank() < k) continue;
    }
    const Vector y = affine_projection(x, gm, h, g, opts);
    if (!y.allFinite() || !feasible(y)) continue;
    const double value = projection_objective(y, x, xs, g);
    const double tie = 1e-14 * std::max(1.0, std::abs(best_value));
    const bool better = !best || value < best_value - tie ||
                        (std::abs(value - best_value) <= tie && k == best_card && lexicographically_less(y, *best));
    if (better) {
      best = y;
      best_value = value;
      best_card = k;
    }
  }
  if (!best) {
    throw Error(ErrorCode::kEmptySet, "intersection of " + std::to_string(rows.size()) +
                                          " constraints is empty (no feasible active set)");
  }
  return *best;
}

}  // namespace scnp
