#include <doctest.h>

#include <cmath>

#include "mdh/bfgs.hpp"

using namespace mdh;

TEST_CASE("bfgs solves a convex quadratic") {
  Eigen::Matrix3d a;
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Eigen::Vector3d target(1.0, -2.0, 0.5);
  const GradientOracle quad = [&](const Vector& x, const Vector&, Vector& g) {
    const Eigen::Vector3d r = x - target;
    g = a * r;
    return 0.5 * r.dot(a * r) + 1.0;
  };
  BfgsOptions opts;
  opts.grad_tol = 1e-12;
  const auto res = bfgs_minimize(quad, Vector::Zero(3), opts);
  CHECK((res.x - target).norm() < 1e-8);
  CHECK(res.iterations <= 30);
}

TEST_CASE("bfgs handles an absolute-value kink") {
  const GradientOracle kink = [](const Vector& x, const Vector&, Vector& g) {
    g = Vector::Constant(1, x(0) >= 0 ? 1.0 : -1.0);
    return std::abs(x(0));
  };
  const auto res = bfgs_minimize(kink, Vector::Constant(1, 3.3));
  CHECK(res.value <= 1e-4);
  CHECK(std::abs(res.x(0)) <= 1e-4);
}

TEST_CASE("bfgs never returns a value above the start") {
  // Rosenbrock with a tight iteration cap.
  const GradientOracle rosen = [](const Vector& x, const Vector&, Vector& g) {
    g.resize(2);
    g(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
    g(1) = 200 * (x(1) - x(0) * x(0));
    return (1 - x(0)) * (1 - x(0)) + 100 * (x(1) - x(0) * x(0)) * (x(1) - x(0) * x(0));
  };
  BfgsOptions opts;
  opts.max_iter = 3;
  Vector x0(2);
  x0 << -1.2, 1.0;
  Vector g;
  const double f0 = rosen(x0, Vector(), g);
  const auto res = bfgs_minimize(rosen, x0, opts);
  CHECK(res.value <= f0);
  CHECK(res.status == BfgsStatus::kMaxIterations);

  opts.max_iter = 200;
  opts.grad_tol = 1e-10;
  const auto full = bfgs_minimize(rosen, x0, opts);
  CHECK(std::abs(full.x(0) - 1.0) < 1e-5);
}

TEST_CASE("bfgs reports numerical failure") {
  const GradientOracle bad = [](const Vector& x, const Vector&, Vector& g) {
    g = Vector::Constant(1, -1.0);
    return x(0) > 0.5 ? std::nan("") : -x(0);
  };
  const auto res = bfgs_minimize(bad, Vector::Zero(1));
  CHECK(res.status == BfgsStatus::kNumericalFailure);
  CHECK(std::isfinite(res.value));
  CHECK(to_string(res.status) == "numerical_failure");
}
