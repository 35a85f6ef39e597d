#include "scnp/wmapping.hpp"

#include <cmath>
#include <string>

#include "overloaded.hpp"
#include "scnp/error.hpp"

namespace scnp {

namespace {

using detail::overloaded;

}  // namespace

NonexpansiveMap NonexpansiveMap::identity() { return NonexpansiveMap(IdentityMap{}); }

NonexpansiveMap NonexpansiveMap::set_projection(ConvexSet set) {
  return NonexpansiveMap(SetProjectionMap{std::move(set)});
}

NonexpansiveMap NonexpansiveMap::affine(Matrix q, Vector b) {
  if (q.rows() != q.cols() || q.rows() != b.size() || q.rows() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "affine map needs square Q matching b");
  }
  if (!q.allFinite() || !b.allFinite()) throw Error(ErrorCode::kInvalidParameter, "affine map is not finite");
  Eigen::JacobiSVD<Matrix> svd(q);
  if (svd.singularValues()[0] > 1.0 + 1e-10) {
    throw Error(ErrorCode::kInvalidParameter, "affine map is not nonexpansive (|Q| > 1)");
  }
  return NonexpansiveMap(AffineContraction{std::move(q), std::move(b)});
}

Vector NonexpansiveMap::apply(const Vector& x) const {
  return std::visit(overloaded{
                        [&](const IdentityMap&) -> Vector { return x; },
                        [&](const SetProjectionMap& s) -> Vector { return metric_projection(x, s.set); },
                        [&](const AffineContraction& a) -> Vector {
                          if (a.q.cols() != x.size()) {
                            throw Error(ErrorCode::kDimensionMismatch, "affine map and vector dimensions differ");
                          }
                          return a.q * x + a.b;
                        },
                    },
                    v_);
}

WFamily::WFamily(std::vector<NonexpansiveMap> maps, std::vector<double> lambdas, double bound)
    : maps_(std::move(maps)), lambdas_(std::move(lambdas)), bound_(bound) {
  if (maps_.empty()) throw Error(ErrorCode::kInvalidParameter, "W family needs at least one map");
  if (lambdas_.size() != maps_.size()) {
    throw Error(ErrorCode::kInvalidParameter, "W family needs one weight per map");
  }
  if (!(bound_ > 0.0 && bound_ < 1.0)) throw Error(ErrorCode::kInvalidParameter, "weight bound must lie in (0, 1)");
  for (double l : lambdas_) {
    if (!(l > 0.0 && l <= bound_)) {
      throw Error(ErrorCode::kInvalidParameter, "weights must satisfy 0 < lambda_i <= bound");
    }
  }
}

WFamily WFamily::uniform(const NonexpansiveMap& t, int depth) {
  if (depth < 1) throw Error(ErrorCode::kInvalidParameter, "W family depth must be >= 1");
  return WFamily(std::vector<NonexpansiveMap>(static_cast<std::size_t>(depth), t),
                 std::vector<double>(static_cast<std::size_t>(depth), kDefaultLambda), kDefaultLambda);
}

Vector apply_wn(const WFamily& family, int n, const Vector& x) {
  if (n < 1 || n > family.depth()) {
    throw Error(ErrorCode::kInvalidParameter,
                "W_n index " + std::to_string(n) + " outside 1.." + std::to_string(family.depth()));
  }
  // Innermost level first; each level mixes with the original x.
  Vector u = x;
  for (int k = n; k >= 1; --k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    const double lambda = family.lambdas()[idx];
    u = lambda * family.maps()[idx].apply(u) + (1.0 - lambda) * x;
  }
  return u;
}

WLimit apply_w_limit(const WFamily& family, const Vector& x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidParameter, "eps must be > 0");
  Vector current = apply_wn(family, 1, x);
  for (int n = 1; n < family.depth(); ++n) {
    Vector next = apply_wn(family, n + 1, x);
    if ((next - current).norm() <= eps) return {std::move(current), n, false};
    current = std::move(next);
  }
  return {std::move(current), family.depth(), true};
}

}  // namespace scnp
