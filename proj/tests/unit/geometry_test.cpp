#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdh/geometry.hpp"
#include "support.hpp"

using namespace mdh;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ProjectionAngle angles(std::initializer_list<double> xs) { return {vec(xs)}; }

Matrix rows2(std::initializer_list<std::pair<double, double>> pts) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), 2);
  Eigen::Index i = 0;
  for (auto [x, y] : pts) {
    m(i, 0) = x;
    m(i, 1) = y;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("angles_to_unit_vector examples") {
  CHECK((angles_to_unit_vector(angles({0.0})) - vec({1, 0})).norm() < 1e-15);
  CHECK((angles_to_unit_vector(angles({pi / 2, 0.0})) - vec({0, 1, 0})).norm() < 1e-15);
  const Vector v = angles_to_unit_vector(angles({pi / 4, pi / 3}));
  CHECK(v(0) == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(v(1) == doctest::Approx(0.35355).epsilon(1e-5));
  CHECK(v(2) == doctest::Approx(0.61237).epsilon(1e-5));
}

TEST_CASE("unit vectors round-trip through angles") {
  CHECK(unit_vector_to_angles(vec({1, 0})).theta(0) == 0.0);
  const auto t = unit_vector_to_angles(vec({0, 0, 1})).theta;
  CHECK(t(0) == doctest::Approx(pi / 2));
  CHECK(t(1) == doctest::Approx(pi / 2));

  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Vector v = testing_support::random_unit(rng, 5);
    const auto a = unit_vector_to_angles(v);
    CHECK((angles_to_unit_vector(a) - v).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index j = 0; j + 1 < a.theta.size(); ++j) {
      CHECK(a.theta(j) >= 0.0);
      CHECK(a.theta(j) <= pi);
    }
    CHECK(a.theta(3) >= 0.0);
    CHECK(a.theta(3) < 2 * pi);
  }
  // Zero tail: remaining angles are zero.
  const auto tail = unit_vector_to_angles(vec({1, 0, 0, 0})).theta;
  CHECK(tail.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(unit_vector_to_angles(vec({1, 1})), std::invalid_argument);
}

TEST_CASE("normalize_angles keeps the direction") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> wide(-20.0, 20.0);
  for (int k = 0; k < 50; ++k) {
    ProjectionAngle a{Vector(4)};
    for (Eigen::Index j = 0; j < 4; ++j) a.theta(j) = wide(rng);
    const auto n = normalize_angles(a);
    CHECK((angles_to_unit_vector(n) - angles_to_unit_vector(a)).norm() < 1e-12);
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(n.theta(j) >= 0.0);
      CHECK(n.theta(j) <= pi);
    }
  }
}

TEST_CASE("jacobian examples") {
  const Matrix j2 = jacobian(angles({0.0}));
  CHECK(j2(0, 0) == doctest::Approx(0.0));
  CHECK(j2(1, 0) == doctest::Approx(1.0));
  const Matrix j3 = jacobian(angles({pi / 2, 0.0}));
  CHECK((j3.col(0) - vec({-1, 0, 0})).norm() < 1e-15);
  CHECK((j3.col(1) - vec({0, 0, 1})).norm() < 1e-15);
}

TEST_CASE("jacobian matches central differences and is tangent") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ProjectionAngle a{Vector(5)};
    for (Eigen::Index j = 0; j < 5; ++j) a.theta(j) = (j < 4 ? pi : 2 * pi) * unit(rng);
    const Matrix jac = jacobian(a);
    const Vector v = angles_to_unit_vector(a);
    const double step = 1e-6;
    for (Eigen::Index k = 0; k < 5; ++k) {
      ProjectionAngle up = a, down = a;
      up.theta(k) += step;
      down.theta(k) -= step;
      const Vector fd = (angles_to_unit_vector(up) - angles_to_unit_vector(down)) / (2 * step);
      CHECK((fd - jac.col(k)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(std::abs(v.dot(jac.col(k))) < 1e-10);
    }
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("projection, margin and partition") {
  const Matrix r = rows2({{1, 2}, {3, 4}});
  CHECK((project(r, vec({1, 0})) - vec({1, 3})).norm() == 0.0);
  CHECK((project(r, vec({0, 1})) - vec({2, 4})).norm() == 0.0);
  Matrix one(1, 2);
  one << 1, 1;
  CHECK(project(one, vec({std::sqrt(0.5), std::sqrt(0.5)}))(0) == doctest::Approx(std::sqrt(2.0)));

  const Matrix pair = rows2({{0, 0}, {2, 0}});
  CHECK(margin(pair, {vec({1, 0}), 1.0}) == 1.0);
  CHECK(margin(pair, {vec({1, 0}), 0.0}) == 0.0);
  CHECK(margin(rows2({{0, 0}, {3, 0}, {0, 4}}), {vec({0.6, 0.8}), 1.0}) == doctest::Approx(0.8));

  CHECK(partition(pair, {vec({1, 0}), 1.0}) == std::vector<int>{-1, 1});
  CHECK(partition(pair, {vec({1, 0}), -5.0}) == std::vector<int>{1, 1});
  CHECK(partition(pair, {vec({1, 0}), 0.0}) == std::vector<int>{1, 1});  // tie goes to +1
}

TEST_CASE("sign flip symmetry of hyperplanes") {
  std::mt19937_64 rng(12);
  const Matrix r = testing_support::gaussian_rows(rng, {{0, 0, 0}}, 25);
  for (int k = 0; k < 10; ++k) {
    const Hyperplane hp{testing_support::random_unit(rng, 3), 0.3};
    const Hyperplane flip{-hp.v, -hp.b};
    CHECK(margin(r, hp) == doctest::Approx(margin(r, flip)));
    const auto a = partition(r, hp), b = partition(r, flip);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == -b[i]);
    CHECK(hyperplane_distance(hp, flip) == 0.0);
    CHECK(same_hyperplane(hp, flip, 1e-12));
    CHECK((hp.canonical().v - flip.canonical().v).norm() == 0.0);
  }
}
