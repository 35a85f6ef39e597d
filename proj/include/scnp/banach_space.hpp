#pragma once

// Finite-dimensional l_p geometry: norms, the normalized duality mapping and
// the Lyapunov functional phi(x, y) = |x|^2 - 2<x, Jy> + |y|^2.
//
// Primal and dual vectors share the same coordinate representation; which
// side a vector lives on is a documentation convention. Every function here
// is pure and safe to call concurrently.

#include <Eigen/Dense>

namespace scnp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTol = 1e-10;

/// l_p^n together with its dual exponent q (1/p + 1/q = 1).
///
/// Any 1 < p < inf is accepted. The convergence theory of the hybrid
/// iteration only covers p in (1, 2], where l_p is 2-uniformly convex.
class SpaceGeometry {
 public:
  SpaceGeometry(int dim, double p);

  int dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  /// Same dimension, exponents swapped.
  SpaceGeometry dual() const;

  bool is_hilbert() const noexcept { return p_ == 2.0; }

  friend bool operator==(const SpaceGeometry&, const SpaceGeometry&) = default;

 private:
  int dim_;
  double p_;
  double q_;
};

/// Throws kDimensionMismatch unless x has g.dim() entries; throws
/// kInvalidParameter on NaN/Inf.
void require_conforms(const Vector& x, const SpaceGeometry& g, const char* what = "vector");

/// (sum |x_i|^p)^(1/p), evaluated with scaling to avoid overflow.
double norm(const Vector& x, const SpaceGeometry& g);

/// Norm of a dual element (exponent q).
double dual_norm(const Vector& x_star, const SpaceGeometry& g);

/// Plain coordinate pairing <x, x*>.
double pairing(const Vector& x, const Vector& x_star);

/// Jx = |x|_p^(2-p) * (|x_i|^(p-1) sign x_i)_i, with J0 = 0.
Vector duality_map(const Vector& x, const SpaceGeometry& g);

/// J^{-1} = J of the dual space (exponent q).
Vector inverse_duality_map(const Vector& x_star, const SpaceGeometry& g);

/// Derivative of the duality map of an l_r space at x (r = exponent). It is
/// diagonal plus rank one:
///   (r-1) |x|^(2-r) diag(|x_i|^(r-2)) + (2-r) |x|^(2-2r) w w^T,
///   w_i = |x_i|^(r-1) sign x_i.
/// For r < 2 the diagonal is unbounded near zero coordinates; those entries are
/// capped at |x_i| >= 1e-12 |x|. At x = 0 the (r = 2) identity is returned.
Matrix duality_jacobian(const Vector& x, double exponent);

/// |x|^2 - 2 <x, Jy> + |y|^2, clamped at zero against round-off.
double phi(const Vector& x, const Vector& y, const SpaceGeometry& g);

}  // namespace scnp
