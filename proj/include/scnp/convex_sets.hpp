#pragma once

// Closed convex sets described declaratively, with membership tests, the
// metric projection (p = 2) and the generalized projection
//   Pi_S x = argmin_{y in S} phi(y, x).

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "scnp/banach_space.hpp"

namespace scnp {

/// {z : <a, z> <= b}. The coefficient vector lives on the dual side.
struct Halfspace {
  Vector a;
  double b = 0.0;

  /// Validating constructor: a = 0 with b < 0 describes the empty set and
  /// throws kEmptySet; a = 0 with b >= 0 is kept and treated as the whole
  /// space.
  static Halfspace make(Vector a, double b);

  bool is_full_space() const { return a.isZero(0.0); }
};

struct FullSpace {
  int dim = 1;
};

struct Box {
  Vector lo;
  Vector hi;
};

/// {z : |z - center|_exponent <= radius}.
struct Ball {
  Vector center;
  double radius = 0.0;
  double exponent = 2.0;
};

struct HalfspaceIntersection {
  int dim = 1;
  std::vector<Halfspace> cuts;
};

class ConvexSet;

/// base ∩ cuts
struct IntersectionWith {
  std::shared_ptr<const ConvexSet> base;
  std::vector<Halfspace> cuts;
};

class ConvexSet {
 public:
  using Variant = std::variant<FullSpace, Box, Ball, HalfspaceIntersection, IntersectionWith>;

  static ConvexSet full_space(int dim);
  static ConvexSet box(Vector lo, Vector hi);
  static ConvexSet ball(Vector center, double radius, double exponent = 2.0);
  static ConvexSet halfspace(Vector a, double b);
  static ConvexSet halfspaces(int dim, std::vector<Halfspace> cuts);
  static ConvexSet intersect(ConvexSet base, std::vector<Halfspace> cuts);

  int dim() const;
  const Variant& variant() const noexcept { return v_; }

 private:
  explicit ConvexSet(Variant v) : v_(std::move(v)) {}

  Variant v_;
};

/// True iff x satisfies every defining constraint up to an additive tol.
bool contains(const ConvexSet& s, const Vector& x, double tol = kDefaultTol);

struct ProjectionOptions {
  /// Feasibility tolerance for candidate points, in distance units.
  double tol = kDefaultTol;
  /// Budget for each inner Newton solve (p != 2).
  int max_newton_iters = 200;
  /// Upper bound on the number of active sets enumerated.
  long max_active_sets = 200000;
};

/// Pi_S x in the geometry g. Coincides with the metric projection when
/// p = 2. Supported combinations:
///   - full space, boxes and (intersections of) halfspaces for any p;
///   - balls for p = 2 (matching exponent), or centred at the origin with
///     exponent equal to p.
/// Throws kEmptySet when the set is provably empty and kNoConvergence when
/// an inner solve exhausts its budget.
Vector generalized_projection(const Vector& x, const ConvexSet& s, const SpaceGeometry& g,
                              const ProjectionOptions& opts = {});

/// Euclidean projection onto s.
Vector metric_projection(const Vector& x, const ConvexSet& s);

/// Pi over base ∩ cuts, by exact enumeration of active constraint sets.
///
/// Every face of a box base and every cut is a candidate active constraint;
/// for each active set the phi-projection onto the corresponding affine
/// subspace is computed (closed form for p = 2, damped Newton otherwise) and
/// the feasible candidate with the smallest phi(., x) wins. Ties go to the
/// smaller active set, then to the lexicographically smaller point, so the
/// result is reproducible bit for bit.
///
/// base must be the full space, a box, or a halfspace intersection.
Vector project_halfspace_intersection(const Vector& x, std::span<const Halfspace> cuts,
                                      const ConvexSet& base, const SpaceGeometry& g,
                                      const ProjectionOptions& opts = {});

}  // namespace scnp
