#pragma once

// Nonexpansive maps and the W-mapping built from a truncated family
// T_1, ..., T_depth with weights lambda_i:
//   U_{n,n+1} = I,
//   U_{n,k}   = lambda_k T_k U_{n,k+1} + (1 - lambda_k) I,   k = n, ..., 1,
//   W_n       = U_{n,1}.

#include <variant>
#include <vector>

#include "scnp/banach_space.hpp"
#include "scnp/convex_sets.hpp"

namespace scnp {

struct IdentityMap {};

/// Metric projection onto a set (Euclidean, so only meaningful for p = 2).
struct SetProjectionMap {
  ConvexSet set;
};

/// T x = Q x + b with spectral norm |Q| <= 1 (nonexpansive in the Euclidean norm).
struct AffineContraction {
  Matrix q;
  Vector b;
};

class NonexpansiveMap {
 public:
  using Variant = std::variant<IdentityMap, SetProjectionMap, AffineContraction>;

  static NonexpansiveMap identity();
  static NonexpansiveMap set_projection(ConvexSet set);
  /// Rejects Q whose spectral norm exceeds 1 + 1e-10.
  static NonexpansiveMap affine(Matrix q, Vector b);

  Vector apply(const Vector& x) const;
  const Variant& variant() const noexcept { return v_; }

 private:
  explicit NonexpansiveMap(Variant v) : v_(std::move(v)) {}

  Variant v_;
};

/// A finite prefix of {T_i} with weights 0 < lambda_i <= bound < 1.
class WFamily {
 public:
  static constexpr int kDefaultDepth = 50;
  static constexpr double kDefaultLambda = 0.5;

  WFamily(std::vector<NonexpansiveMap> maps, std::vector<double> lambdas, double bound);

  /// `depth` copies of T with the default weight 0.5.
  static WFamily uniform(const NonexpansiveMap& t, int depth = kDefaultDepth);

  int depth() const noexcept { return static_cast<int>(maps_.size()); }
  const std::vector<NonexpansiveMap>& maps() const noexcept { return maps_; }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  double bound() const noexcept { return bound_; }

 private:
  std::vector<NonexpansiveMap> maps_;
  std::vector<double> lambdas_;
  double bound_;
};

/// W_n x for 1 <= n <= depth; throws kInvalidParameter otherwise.
Vector apply_wn(const WFamily& family, int n, const Vector& x);

struct WLimit {
  Vector value;
  int n_used = 0;
  /// True when no n < depth met the tolerance; value is then W_depth x.
  bool truncated = false;
};

/// W_n x for the smallest n with |W_{n+1} x - W_n x|_2 <= eps.
WLimit apply_w_limit(const WFamily& family, const Vector& x, double eps);

}  // namespace scnp
