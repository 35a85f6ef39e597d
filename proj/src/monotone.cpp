#include "scnp/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "newton.hpp"
#include "overloaded.hpp"
#include "scnp/error.hpp"

namespace scnp {

namespace {

using detail::overloaded;

// The linear part B of a single-valued operator (a I for scaling).
Matrix linear_part(const MonotoneOp& m, int dim) {
  return std::visit(overloaded{
                        [&](const Scaling& s) -> Matrix { return s.a * Matrix::Identity(dim, dim); },
                        [&](const LinearPSD& l) -> Matrix {
                          if (l.b.rows() != dim) {
                            throw Error(ErrorCode::kDimensionMismatch, "operator and geometry dimensions differ");
                          }
                          return l.b;
                        },
                        [&](const IndicatorSubdifferential&) -> Matrix {
                          throw Error(ErrorCode::kNotSingleValued, "the indicator subdifferential has no linear part");
                        },
                    },
                    m.variant());
}

}  // namespace

MonotoneOp MonotoneOp::scaling(double a) {
  if (!std::isfinite(a) || a < 0.0) throw Error(ErrorCode::kInvalidParameter, "scaling factor must be >= 0");
  return MonotoneOp(Scaling{a});
}

MonotoneOp MonotoneOp::linear_psd(Matrix b) {
  if (b.rows() != b.cols() || b.rows() < 1) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  if (!b.allFinite()) throw Error(ErrorCode::kInvalidParameter, "B is not finite");
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::kInvalidParameter, "B must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw Error(ErrorCode::kInvalidParameter, "B must be positive semidefinite");
  }
  return MonotoneOp(LinearPSD{std::move(b)});
}

MonotoneOp MonotoneOp::indicator(ConvexSet set) { return MonotoneOp(IndicatorSubdifferential{std::move(set)}); }

Vector eval(const MonotoneOp& m, const Vector& x) {
  return std::visit(overloaded{
                        [&](const Scaling& s) -> Vector { return s.a * x; },
                        [&](const LinearPSD& l) -> Vector {
                          if (l.b.cols() != x.size()) {
                            throw Error(ErrorCode::kDimensionMismatch, "operator and vector dimensions differ");
                          }
                          return l.b * x;
                        },
                        [&](const IndicatorSubdifferential&) -> Vector {
                          throw Error(ErrorCode::kNotSingleValued, "the indicator subdifferential is set-valued");
                        },
                    },
                    m.variant());
}

double resolvent_residual(const MonotoneOp& m, double r, const Vector& x, const Vector& u, const SpaceGeometry& g) {
  require_conforms(x, g, "resolvent argument");
  require_conforms(u, g, "resolvent value");
  return dual_norm(Vector(duality_map(u, g) + r * eval(m, u) - duality_map(x, g)), g);
}

Vector generalized_resolvent(const MonotoneOp& m, double r, const Vector& x, const SpaceGeometry& g,
                             const ResolventOptions& opts) {
  if (!std::isfinite(r) || r <= 0.0) throw Error(ErrorCode::kInvalidParameter, "resolvent parameter must be > 0");
  require_conforms(x, g, "resolvent argument");

  if (const auto* ind = std::get_if<IndicatorSubdifferential>(&m.variant())) {
    return generalized_projection(x, ind->set, g, opts.projection);
  }
  if (const auto* s = std::get_if<Scaling>(&m.variant())) {
    if (s->a == 0.0) return x;
    if (g.is_hilbert()) return x / (1.0 + r * s->a);
  }
  const int dim = g.dim();
  const Matrix b = linear_part(m, dim);
  if (g.is_hilbert()) {
    const Matrix lhs = Matrix::Identity(dim, dim) + r * b;
    return lhs.ldlt().solve(x);
  }

  const Vector xs = duality_map(x, g);
  detail::NewtonOptions nopts;
  nopts.max_iters = opts.max_newton_iters;
  nopts.grad_tol = opts.tol * std::max(1.0, xs.lpNorm<Eigen::Infinity>());

  Vector u;
  detail::NewtonResult res;
  if (g.p() > 2.0) {
    auto residual = [&](const Vector& w) -> Vector { return duality_map(w, g) + r * (b * w) - xs; };
    auto jacobian = [&](const Vector& w) -> Matrix { return duality_jacobian(w, g.p()) + r * b; };
    res = detail::newton_root(residual, jacobian, x, nopts);
    u = res.x;
  } else {
    const SpaceGeometry dual = g.dual();
    auto residual = [&](const Vector& v) -> Vector { return v + r * (b * inverse_duality_map(v, g)) - xs; };
    auto jacobian = [&](const Vector& v) -> Matrix {
      return Matrix::Identity(dim, dim) + r * b * duality_jacobian(v, dual.p());
    };
    res = detail::newton_root(residual, jacobian, xs, nopts);
    u = inverse_duality_map(res.x, g);
  }
  if (!res.converged) {
    throw Error(ErrorCode::kNoConvergence,
                "resolvent Newton stopped after " + std::to_string(res.iterations) + " iterations, residual " +
                    std::to_string(res.residual));
  }
  return u;
}

bool check_resolvent_inequality(const MonotoneOp& m, double r, const Vector& x, const Vector& y_zero,
                                const SpaceGeometry& g) {
  const Vector u = generalized_resolvent(m, r, x, g);
  return phi(y_zero, u, g) + phi(u, x, g) <= phi(y_zero, x, g) + 1e-8;
}

}  // namespace scnp
