#include "scnp/banach_space.hpp"

#include <cmath>
#include <string>

#include "scnp/error.hpp"

namespace scnp {

namespace {

double lp_norm(const Vector& x, double p) {
  const double scale = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (p == 2.0) return x.norm();
  double acc = 0.0;
  for (double v : x) acc += std::pow(std::abs(v) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

Vector lp_duality(const Vector& x, double p) {
  if (p == 2.0) return x;
  const double n = lp_norm(x, p);
  Vector out = Vector::Zero(x.size());
  if (n == 0.0) return out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (a == 0.0) continue;
    out[i] = std::copysign(n * std::pow(a / n, p - 1.0), x[i]);
  }
  return out;
}

}  // namespace

SpaceGeometry::SpaceGeometry(int dim, double p) : dim_(dim), p_(p), q_(0.0) {
  if (dim < 1) throw Error(ErrorCode::kInvalidParameter, "dimension must be >= 1");
  if (!std::isfinite(p) || p <= 1.0) {
    throw Error(ErrorCode::kInvalidParameter, "norm exponent must satisfy 1 < p < inf");
  }
  q_ = p == 2.0 ? 2.0 : p / (p - 1.0);
}

SpaceGeometry SpaceGeometry::dual() const { return SpaceGeometry(dim_, q_); }

void require_conforms(const Vector& x, const SpaceGeometry& g, const char* what) {
  if (x.size() != g.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has " + std::to_string(x.size()) + " entries, expected " +
                    std::to_string(g.dim()));
  }
  if (!x.allFinite()) throw Error(ErrorCode::kInvalidParameter, std::string(what) + " is not finite");
}

double norm(const Vector& x, const SpaceGeometry& g) {
  require_conforms(x, g);
  return lp_norm(x, g.p());
}

double dual_norm(const Vector& x_star, const SpaceGeometry& g) {
  require_conforms(x_star, g, "dual vector");
  return lp_norm(x_star, g.q());
}

double pairing(const Vector& x, const Vector& x_star) {
  if (x.size() != x_star.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "pairing of vectors with different lengths");
  }
  return x.dot(x_star);
}

Vector duality_map(const Vector& x, const SpaceGeometry& g) {
  require_conforms(x, g);
  return lp_duality(x, g.p());
}

Vector inverse_duality_map(const Vector& x_star, const SpaceGeometry& g) {
  require_conforms(x_star, g, "dual vector");
  return lp_duality(x_star, g.q());
}

Matrix duality_jacobian(const Vector& x, double exponent) {
  const auto n = x.size();
  const double r = exponent;
  const double nrm = lp_norm(x, r);
  if (r == 2.0 || nrm == 0.0) return Matrix::Identity(n, n);
  const double floor = 1e-12;
  Vector s(n);
  Matrix jac = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = std::abs(x[i]) / nrm;
    s[i] = std::copysign(std::pow(t, r - 1.0), x[i]);
    jac(i, i) = (r - 1.0) * std::pow(std::max(t, floor), r - 2.0);
  }
  jac.noalias() += (2.0 - r) * s * s.transpose();
  return jac;
}

double phi(const Vector& x, const Vector& y, const SpaceGeometry& g) {
  require_conforms(x, g, "first argument");
  require_conforms(y, g, "second argument");
  const double nx = lp_norm(x, g.p());
  const double ny = lp_norm(y, g.p());
  const double value = nx * nx - 2.0 * x.dot(lp_duality(y, g.p())) + ny * ny;
  return value < 0.0 ? 0.0 : value;
}

}  // namespace scnp
