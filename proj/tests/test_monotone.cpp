#include <cmath>

#include "doctest.h"
#include "scnp/error.hpp"
#include "scnp/monotone.hpp"
#include "support/oracles.hpp"

using namespace scnp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected scnp::Error");
  return ErrorCode::kIo;
}

// B = V diag(d) V^T with the trailing `zeros` eigenvalues set to 0; returns B
// and a basis of its kernel.
std::pair<Matrix, Matrix> psd_with_kernel(oracle::Rng& rng, int dim, int zeros) {
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) m.col(i) = rng.vec(dim);
  const Matrix v = Eigen::HouseholderQR<Matrix>(m).householderQ() * Matrix::Identity(dim, dim);
  Vector d = rng.vec(dim, 0.2, 2.0);
  d.tail(zeros).setZero();
  Matrix b = v * d.asDiagonal() * v.transpose();
  return {0.5 * (b + b.transpose()), v.rightCols(zeros)};
}

}  // namespace

TEST_CASE("construction") {
  CHECK(code_of([] { MonotoneOp::scaling(-0.1); }) == ErrorCode::kInvalidParameter);
  Matrix asym(2, 2);
  asym << 1, 1, 0, 1;
  CHECK(code_of([&] { MonotoneOp::linear_psd(asym); }) == ErrorCode::kInvalidParameter);
  Matrix neg(2, 2);
  neg << 1, 0, 0, -0.5;
  CHECK(code_of([&] { MonotoneOp::linear_psd(neg); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { MonotoneOp::linear_psd(Matrix::Identity(2, 3)); }) == ErrorCode::kDimensionMismatch);
  CHECK(MonotoneOp::scaling(0).is_single_valued());
  CHECK_FALSE(MonotoneOp::indicator(ConvexSet::full_space(1)).is_single_valued());
}

TEST_CASE("eval") {
  CHECK(eval(MonotoneOp::scaling(2), vec({0.5}))[0] == 1.0);
  CHECK(eval(MonotoneOp::scaling(0), vec({3, -4})).isZero(0.0));
  CHECK(eval(MonotoneOp::linear_psd(Matrix::Identity(2, 2)), vec({1, 2})) == vec({1, 2}));
  CHECK(code_of([] { eval(MonotoneOp::indicator(ConvexSet::box(vec({0}), vec({1}))), vec({0.5})); }) ==
        ErrorCode::kNotSingleValued);
}

TEST_CASE("resolvent examples") {
  const SpaceGeometry g1(1, 2.0);
  for (double x : {-1.0, 0.0, 0.3, 1.0, 7.0}) {
    CHECK(generalized_resolvent(MonotoneOp::scaling(2), 0.25, vec({x}), g1)[0] == doctest::Approx(2.0 / 3 * x));
    CHECK(generalized_resolvent(MonotoneOp::scaling(3), 0.25, vec({x}), g1)[0] == doctest::Approx(4.0 / 7 * x));
  }
  const MonotoneOp ind = MonotoneOp::indicator(ConvexSet::box(vec({0}), vec({1})));
  for (double r : {0.01, 1.0, 100.0}) CHECK(generalized_resolvent(ind, r, vec({2}), g1)[0] == 1.0);
  CHECK(code_of([&] { generalized_resolvent(MonotoneOp::scaling(1), 0.0, vec({1}), g1); }) ==
        ErrorCode::kInvalidParameter);
  CHECK(code_of([&] { generalized_resolvent(MonotoneOp::scaling(1), -1.0, vec({1}), g1); }) ==
        ErrorCode::kInvalidParameter);
}

TEST_CASE("p = 2 linear resolvent solves (I + rB) u = x") {
  oracle::Rng rng(41);
  const SpaceGeometry g(3, 2.0);
  for (int k = 0; k < 50; ++k) {
    auto [b, kernel] = psd_with_kernel(rng, 3, 1);
    const double r = rng.uniform(0.1, 2);
    const Vector x = rng.vec(3);
    const Vector u = generalized_resolvent(MonotoneOp::linear_psd(b), r, x, g);
    CHECK(((Matrix::Identity(3, 3) + r * b) * u - x).norm() <= 1e-12);
  }
}

TEST_CASE("one-dimensional resolvents have the Hilbert closed form for every p") {
  // In one dimension J is the identity, so J_r x = x / (1 + r a).
  for (double p : {1.5, 3.0, 4.0}) {
    const SpaceGeometry g(1, p);
    for (double x : {-2.0, 0.5, 3.0}) {
      const double u = generalized_resolvent(MonotoneOp::scaling(2), 0.7, vec({x}), g)[0];
      CHECK(std::abs(u - x / 2.4) <= 1e-12);
    }
  }
}

TEST_CASE("resolvent residual for p != 2") {
  oracle::Rng rng(43);
  for (double p : {1.2, 1.5, 3.0, 4.0}) {
    for (int k = 0; k < 100; ++k) {
      const int dim = 1 + k % 4;
      const SpaceGeometry g(dim, p);
      const double r = rng.uniform(0.05, 3);
      const Vector x = rng.vec(dim, -2, 2);
      const MonotoneOp m = k % 2 ? MonotoneOp::scaling(rng.uniform(0, 3))
                                 : MonotoneOp::linear_psd(psd_with_kernel(rng, dim, k % 3 == 0 ? 1 : 0).first);
      const Vector u = generalized_resolvent(m, r, x, g);
      CHECK(resolvent_residual(m, r, x, u, g) <= 1e-8);
      // Independent check with the textbook duality map.
      CHECK((oracle::duality(u, p) + r * eval(m, u) - oracle::duality(x, p)).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }
}

TEST_CASE("resolvent inequality examples") {
  const SpaceGeometry g1(1, 2.0);
  // phi(0, 2/3) + phi(2/3, 1) = 4/9 + 1/9 <= 1
  CHECK(check_resolvent_inequality(MonotoneOp::scaling(2), 0.25, vec({1}), vec({0}), g1));
  CHECK(check_resolvent_inequality(MonotoneOp::scaling(2), 0.25, vec({0}), vec({0}), g1));
  const MonotoneOp ind = MonotoneOp::indicator(ConvexSet::box(vec({0, 0}), vec({1, 1})));
  CHECK(check_resolvent_inequality(ind, 1.0, vec({0.5, 0.5}), vec({0.5, 0.5}), SpaceGeometry(2, 3.0)));
  // A point that is not a null point can violate it.
  CHECK_FALSE(check_resolvent_inequality(MonotoneOp::scaling(2), 0.25, vec({1}), vec({1}), g1));
}

TEST_CASE("random PSD instances satisfy the resolvent inequality") {
  oracle::Rng rng(47);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 1000; ++k) {
      const int dim = 2 + k % 3;
      const SpaceGeometry g(dim, p);
      auto [b, kernel] = psd_with_kernel(rng, dim, 1);
      const MonotoneOp m = MonotoneOp::linear_psd(b);
      const Vector y0 = kernel.col(0) * rng.uniform(-2, 2);
      const double r = rng.uniform(0.1, 2);
      const Vector x = rng.vec(dim, -2, 2);
      CHECK(check_resolvent_inequality(m, r, x, y0, g));
      CHECK((generalized_resolvent(m, r, y0, g) - y0).norm() <= 1e-8);
      if (p == 2.0) {
        const Vector u = generalized_resolvent(m, r, x, g);
        CHECK((u - y0).dot(x - u) >= -1e-8);
      }
    }
  }
}

TEST_CASE("monotonicity") {
  oracle::Rng rng(53);
  for (int k = 0; k < 500; ++k) {
    const int dim = 1 + k % 4;
    const MonotoneOp m = k % 2 ? MonotoneOp::scaling(rng.uniform(0, 5)) : MonotoneOp::linear_psd(psd_with_kernel(rng, dim, 1).first);
    const Vector x = rng.vec(dim), y = rng.vec(dim);
    CHECK((x - y).dot(eval(m, x) - eval(m, y)) >= -1e-10);
  }
}
