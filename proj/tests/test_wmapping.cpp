#include <cmath>

#include "doctest.h"
#include "scnp/error.hpp"
#include "scnp/wmapping.hpp"
#include "support/oracles.hpp"

using namespace scnp;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected scnp::Error");
  return ErrorCode::kIo;
}

// T x = Q (x - z) + z with |Q| <= 1, so z is a common fixed point.
NonexpansiveMap contraction_about(oracle::Rng& rng, const Vector& z) {
  const int dim = static_cast<int>(z.size());
  Matrix q(dim, dim);
  for (int i = 0; i < dim; ++i) q.col(i) = rng.vec(dim);
  q /= Eigen::JacobiSVD<Matrix>(q).singularValues()[0] * rng.uniform(1.0, 1.5);
  return NonexpansiveMap::affine(q, z - q * z);
}

}  // namespace

TEST_CASE("construction") {
  CHECK(code_of([] { WFamily({}, {}, 0.5); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { WFamily({NonexpansiveMap::identity()}, {0.6}, 0.5); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { WFamily({NonexpansiveMap::identity()}, {0.0}, 0.5); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { WFamily({NonexpansiveMap::identity()}, {0.5}, 1.0); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { WFamily({NonexpansiveMap::identity()}, {0.5, 0.5}, 0.5); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { NonexpansiveMap::affine(2.0 * Matrix::Identity(2, 2), Vector::Zero(2)); }) ==
        ErrorCode::kInvalidParameter);
  const WFamily uni = WFamily::uniform(NonexpansiveMap::identity());
  CHECK(uni.depth() == 50);
  CHECK(uni.bound() == 0.5);
  for (double l : uni.lambdas()) CHECK(l == 0.5);
}

TEST_CASE("identity family") {
  const WFamily fam = WFamily::uniform(NonexpansiveMap::identity(), 20);
  const Vector x = Vector::LinSpaced(3, -1, 2);
  for (int n = 1; n <= 20; ++n) CHECK(apply_wn(fam, n, x) == x);
  const WLimit lim = apply_w_limit(fam, x, 1e-12);
  CHECK(lim.value == x);
  CHECK(lim.n_used == 1);
  CHECK_FALSE(lim.truncated);
}

TEST_CASE("single unrolling") {
  oracle::Rng rng(61);
  const NonexpansiveMap t = NonexpansiveMap::set_projection(ConvexSet::box(Vector::Zero(2), Vector::Ones(2)));
  const WFamily fam({t}, {0.3}, 0.5);
  const Vector x = rng.vec(2, -3, 3);
  CHECK((apply_wn(fam, 1, x) - (0.3 * t.apply(x) + 0.7 * x)).norm() <= 1e-15);
}

TEST_CASE("two levels unroll with the original point") {
  oracle::Rng rng(67);
  const Vector z = rng.vec(2);
  const NonexpansiveMap t1 = contraction_about(rng, z), t2 = contraction_about(rng, z);
  const WFamily fam({t1, t2}, {0.4, 0.2}, 0.5);
  const Vector x = rng.vec(2);
  const Vector u2 = 0.2 * t2.apply(x) + 0.8 * x;
  const Vector w2 = 0.4 * t1.apply(u2) + 0.6 * x;
  CHECK((apply_wn(fam, 2, x) - w2).norm() <= 1e-15);
}

TEST_CASE("index range") {
  const WFamily fam = WFamily::uniform(NonexpansiveMap::identity(), 3);
  CHECK(code_of([&] { apply_wn(fam, 0, Vector::Zero(1)); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([&] { apply_wn(fam, 4, Vector::Zero(1)); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([&] { apply_w_limit(fam, Vector::Zero(1), 0.0); }) == ErrorCode::kInvalidParameter);
}

TEST_CASE("a single nontrivial map stabilizes at n = 1") {
  const NonexpansiveMap t = NonexpansiveMap::set_projection(ConvexSet::box(Vector::Zero(2), Vector::Ones(2)));
  std::vector<NonexpansiveMap> maps(10, NonexpansiveMap::identity());
  maps[0] = t;
  const WFamily fam(maps, std::vector<double>(10, 0.5), 0.5);
  const Vector x = Vector::Constant(2, 3.0);
  const WLimit lim = apply_w_limit(fam, x, 1e-14);
  CHECK(lim.n_used == 1);
  CHECK(lim.value == apply_wn(fam, 1, x));
}

TEST_CASE("random contractions with a common fixed point") {
  oracle::Rng rng(71);
  const Vector z = rng.vec(3);
  std::vector<NonexpansiveMap> maps;
  std::vector<double> lambdas;
  for (int i = 0; i < 10; ++i) {
    maps.push_back(contraction_about(rng, z));
    lambdas.push_back(rng.uniform(0.1, 0.6));
  }
  const double b = 0.6;
  const WFamily fam(maps, lambdas, b);
  for (int n = 1; n <= 10; ++n) CHECK((apply_wn(fam, n, z) - z).lpNorm<Eigen::Infinity>() <= 1e-12);
  const WLimit at_z = apply_w_limit(fam, z, 1e-12);
  CHECK((at_z.value - z).norm() <= 1e-12);

  // |W_{n+1} x - W_n x| <= b^{n+1} |T_{n+1} x - x| <= 2 b^{n+1} |x - z|
  const Vector x = rng.vec(3, -3, 3);
  for (int n = 1; n < 10; ++n) {
    const double diff = (apply_wn(fam, n + 1, x) - apply_wn(fam, n, x)).norm();
    CHECK(diff <= 2.0 * std::pow(b, n + 1) * (x - z).norm() + 1e-15);
  }
  const WLimit lim = apply_w_limit(fam, x, 1e-30);
  CHECK(lim.truncated);
  CHECK(lim.n_used == 10);
}

TEST_CASE("W_n is nonexpansive and deterministic") {
  oracle::Rng rng(73);
  for (int k = 0; k < 300; ++k) {
    const int dim = 1 + k % 3;
    const Vector z = rng.vec(dim);
    std::vector<NonexpansiveMap> maps;
    for (int i = 0; i < 5; ++i) maps.push_back(contraction_about(rng, z));
    const WFamily fam(maps, std::vector<double>(5, 0.5), 0.5);
    const Vector x = rng.vec(dim, -2, 2), y = rng.vec(dim, -2, 2);
    for (int n = 1; n <= 5; ++n) {
      CHECK((apply_wn(fam, n, x) - apply_wn(fam, n, y)).norm() <= (x - y).norm() * (1 + 1e-10));
      CHECK(apply_wn(fam, n, x) == apply_wn(fam, n, x));
    }
  }
}
