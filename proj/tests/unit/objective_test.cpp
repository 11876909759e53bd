#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdh/kde1d.hpp"
#include "mdh/objective.hpp"
#include "support.hpp"

using namespace mdh;
using testing_support::reference_kde;
using testing_support::relative_gap;

namespace {

Vector e1(Eigen::Index d) {
  Vector v = Vector::Zero(d);
  v(0) = 1.0;
  return v;
}

Dataset line_data(const std::vector<double>& xs) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = xs[i];
    m(static_cast<Eigen::Index>(i), 1) = 0.01 * static_cast<double>(i % 3);
  }
  return Dataset(m);
}

double lipschitz_by_hand(double h) {
  return 1.0 / (std::exp(0.5) * h * h * std::sqrt(2.0 * std::numbers::pi));
}

// Penalised profile written out from scratch.
double reference_f(const std::vector<double>& p, double h, double alpha, double eta, double eps,
                   double b) {
  double mean = 0.0;
  for (double x : p) mean += x;
  mean /= static_cast<double>(p.size());
  double ss = 0.0;
  for (double x : p) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(p.size()));
  const double t = std::max({0.0, mean - alpha * sd - b, b - mean - alpha * sd});
  return reference_kde(p, h, b) + lipschitz_by_hand(h) / std::pow(eta, eps) * std::pow(t, 1.0 + eps);
}

// Dense-grid argmin of the penalised profile over [lo, hi].
double dense_argmin(const std::vector<double>& p, double h, double alpha, double lo, double hi,
                    int m = 100000) {
  double best = lo, best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const double b = lo + (hi - lo) * k / (m - 1);
    const double v = reference_f(p, h, alpha, 1e-2, 1.0 - 1e-6, b);
    if (v < best_v) {
      best_v = v;
      best = b;
    }
  }
  return best;
}

double phi(const ProjectionAngle& a, const Dataset& ds, double h, const PenaltyParams& pp,
           const LabeledSubset* lab) {
  return minimize_over_b(angles_to_unit_vector(a), ds, h, pp, lab).value;
}

}  // namespace

TEST_CASE("feasible interval examples") {
  const std::vector<double> two = {0.0, 2.0};
  auto iv = feasible_interval(two, 1.0);
  CHECK(iv.lo == 0.0);
  CHECK(iv.hi == 2.0);
  iv = feasible_interval(two, 0.0);
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 1.0);
  const std::vector<double> four = {1, 2, 3, 4};
  iv = feasible_interval(four, 0.9);
  CHECK(iv.lo == doctest::Approx(2.5 - 0.9 * std::sqrt(1.25)));
  CHECK(iv.hi == doctest::Approx(2.5 + 0.9 * std::sqrt(1.25)));
}

TEST_CASE("penalty parameters validate their ranges") {
  CHECK_THROWS(PenaltyParams::for_bandwidth(1.0, -0.1, 0.0).validate());
  CHECK_THROWS(PenaltyParams::for_bandwidth(1.0, 0.5, 0.0, 1.5).validate());
  CHECK_THROWS(PenaltyParams::for_bandwidth(1.0, 0.5, 0.0, 0.01, 1.0).validate());
  CHECK_THROWS(PenaltyParams::for_bandwidth(1.0, 0.5, -1.0).validate());
  CHECK_NOTHROW(PenaltyParams::for_bandwidth(1.0, 0.5, 0.0).validate());
}

TEST_CASE("f_cl matches a scalar evaluation") {
  Matrix m(2, 2);
  m << 0, 0, 2, 0;
  const Dataset ds(m);
  const auto pp = PenaltyParams::for_bandwidth(1.0, 0.5, 0.0);
  const double eps = 1.0 - 1e-6;
  const double density = (std::exp(-2.0) + 1.0) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  const double expect = density + lipschitz_by_hand(1.0) / std::pow(0.01, eps) * std::pow(0.5, 1.0 + eps);
  CHECK(relative_gap(f_cl(e1(2), 2.0, ds, 1.0, pp), expect) < 1e-14);
  // Roughly L * t^2 / eta.
  CHECK(f_cl(e1(2), 2.0, ds, 1.0, pp) == doctest::Approx(density + lipschitz_by_hand(1.0) * 25.0).epsilon(1e-4));
  // Interior offsets carry no penalty.
  CHECK(f_cl(e1(2), 1.0, ds, 1.0, pp) == density_integral(ProjectedKde(std::vector<double>{0.0, 2.0}, 1.0), 1.0));
}

TEST_CASE("f_cl dominates the density and equals it on the interval") {
  std::mt19937_64 rng(4);
  const Dataset ds(testing_support::gaussian_rows(rng, {{-2, 0}, {2, 1}}, 20));
  const auto pp = PenaltyParams::for_bandwidth(0.6, 0.4, 0.0);
  const Vector v = testing_support::random_unit(rng, 2);
  const Vector p = project(ds, v);
  const ProjectedKde kde(p, 0.6);
  const auto iv = feasible_interval(std::vector<double>(p.data(), p.data() + p.size()), 0.4);
  for (int k = 0; k <= 200; ++k) {
    const double b = iv.lo - 2.0 + (iv.hi - iv.lo + 4.0) * k / 200.0;
    const double f = f_cl(v, b, ds, 0.6, pp);
    const double d = density_integral(kde, b);
    if (b >= iv.lo && b <= iv.hi) CHECK(std::abs(f - d) <= 1e-14);
    else CHECK(f > d);
  }
}

TEST_CASE("f_ssc adds the label penalty") {
  Matrix m(4, 2);
  m << -2, 0, -1, 0, 1, 0, 2, 0;
  const Dataset ds(m);
  auto pp = PenaltyParams::for_bandwidth(1.0, 0.9, 10.0);
  LabeledSubset correct{{0, 3}, {-1, 1}};
  CHECK(f_ssc(e1(2), 0.0, ds, correct, 1.0, pp) == f_cl(e1(2), 0.0, ds, 1.0, pp));

  // Row 2 projects to 1 with label -1; at b = 0.7 it is violated by 0.3.
  LabeledSubset violated{{0, 2}, {-1, -1}};
  const double eps = 1.0 - 1e-6;
  const double expect = f_cl(e1(2), 0.7, ds, 1.0, pp) + 10.0 * std::pow(0.3, 1.0 + eps);
  CHECK(relative_gap(f_ssc(e1(2), 0.7, ds, violated, 1.0, pp), expect) < 1e-14);
}

TEST_CASE("inner minimisation on a bimodal profile") {
  const std::vector<double> p = {-2, -2, 2, 2};
  const auto pp = PenaltyParams::for_bandwidth(0.5, 0.9, 0.0);
  const PenalizedProfile profile(p, 0.5, pp);
  const auto sol = minimize_over_b(profile);
  const auto win = search_window(profile);
  const double ref = dense_argmin(p, 0.5, 0.9, win.lo, win.hi);
  CHECK(std::abs(sol.b_star) < 1e-6);
  CHECK(std::abs(sol.b_star - ref) < 1e-3);
  CHECK(sol.is_density_minimizer);
  CHECK(std::find(sol.minimizer_set.begin(), sol.minimizer_set.end(), sol.b_star) != sol.minimizer_set.end());
  CHECK(std::abs(sol.value - profile.value(sol.b_star)) <= 1e-12);
}

TEST_CASE("inner minimisation on a unimodal profile pins to the interval edge") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> p(60);
  for (double& x : p) x = normal(rng);
  const double h = 0.5;
  const auto pp = PenaltyParams::for_bandwidth(h, 0.1, 0.0);
  const PenalizedProfile profile(p, h, pp);
  const auto sol = minimize_over_b(profile);
  const auto& iv = profile.interval();
  const auto win = search_window(profile);
  const double ref = dense_argmin(p, h, 0.1, win.lo, win.hi);
  CHECK_FALSE(sol.is_density_minimizer);
  CHECK(std::abs(sol.b_star - ref) < 1e-3);
  const double edge = std::min(std::abs(sol.b_star - iv.lo), std::abs(sol.b_star - iv.hi));
  CHECK(edge <= pp.eta);
}

TEST_CASE("penalised minimisers stay within eta of the constrained minimiser") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> p(40);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = normal(rng) + (i % 3 == 0 ? 3.0 : 0.0);
    const double h = 0.3 + 0.5 * unit(rng), alpha = 0.05 + unit(rng);
    const auto pp = PenaltyParams::for_bandwidth(h, alpha, 0.0);
    const PenalizedProfile profile(p, h, pp);
    const auto sol = minimize_over_b(profile);
    const auto& iv = profile.interval();
    double best = iv.lo, best_v = 1e300;
    for (int k = 0; k < 100000; ++k) {
      const double b = iv.lo + (iv.hi - iv.lo) * k / 99999.0;
      const double v = reference_kde(p, h, b);
      if (v < best_v) {
        best_v = v;
        best = b;
      }
    }
    double nearest = 1e300;
    for (double b : sol.minimizer_set) {
      CHECK(b >= iv.lo - pp.eta);
      CHECK(b <= iv.hi + pp.eta);
      nearest = std::min(nearest, std::abs(b - best));
    }
    CHECK(nearest <= pp.eta);
  }
}

TEST_CASE("envelope: perturbing the minimiser does not lower the profile") {
  std::mt19937_64 rng(23);
  const Dataset ds(testing_support::gaussian_rows(rng, {{-3, 0}, {3, 0}}, 30));
  const auto pp = PenaltyParams::for_bandwidth(0.5, 0.9, 0.0);
  const Vector v = e1(2);
  const Vector p = project(ds, v);
  const PenalizedProfile profile(std::vector<double>(p.data(), p.data() + p.size()), 0.5, pp);
  const auto sol = minimize_over_b(profile);
  const double f0 = profile.value(sol.b_star);
  CHECK(profile.value(sol.b_star + sol.tol_b) >= f0 - 1e-12 * f0);
  CHECK(profile.value(sol.b_star - sol.tol_b) >= f0 - 1e-12 * f0);
}

TEST_CASE("projection index gradient matches central differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked_active = 0, checked_inactive = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index d = trial % 2 == 0 ? 2 : 4;
    std::vector<std::vector<double>> centres(2, std::vector<double>(static_cast<std::size_t>(d), 0.0));
    centres[1][0] = 4.0;
    const auto [c, mean] = center(Dataset(testing_support::gaussian_rows(rng, centres, 25)));
    const double h = 0.5;
    const bool active = trial % 4 < 2;
    const auto pp = PenaltyParams::for_bandwidth(h, active ? 0.02 : 1.2, 0.0);
    ProjectionAngle a{Vector(d - 1)};
    for (Eigen::Index j = 0; j < d - 1; ++j) a.theta(j) = 0.2 + 2.5 * unit(rng);

    const auto eval = phi_value_and_gradient(a, c, h, pp, nullptr);
    if (eval.inner.minimizer_set.size() != 1) continue;
    const Vector proj = project(c, eval.v);
    const auto iv = feasible_interval(std::vector<double>(proj.data(), proj.data() + proj.size()), pp.alpha);
    const bool is_active = eval.b < iv.lo || eval.b > iv.hi;
    const double step = 1e-6;
    Vector fd(d - 1);
    for (Eigen::Index k = 0; k < d - 1; ++k) {
      ProjectionAngle up = a, down = a;
      up.theta(k) += step;
      down.theta(k) -= step;
      fd(k) = (phi(up, c, h, pp, nullptr) - phi(down, c, h, pp, nullptr)) / (2 * step);
    }
    CHECK((eval.grad - fd).norm() <= 1e-5 * fd.norm() + 1e-10);
    (is_active ? checked_active : checked_inactive)++;
  }
  CHECK(checked_active >= 5);
  CHECK(checked_inactive >= 5);
}

TEST_CASE("semi-supervised gradient matches central differences") {
  std::mt19937_64 rng(41);
  const auto [c, mean] = center(Dataset(testing_support::gaussian_rows(rng, {{0, 0, 0}, {3, 1, 0}}, 20)));
  // Labels disagreeing with the density valley keep the label penalty active.
  LabeledSubset lab{{0, 1, 25, 30}, {1, -1, 1, -1}};
  const auto pp = PenaltyParams::for_bandwidth(0.6, 0.9, 1.0);
  ProjectionAngle a{Vector(2)};
  a.theta << 0.7, 1.1;
  const auto eval = phi_value_and_gradient(a, c, 0.6, pp, &lab);
  REQUIRE(eval.inner.minimizer_set.size() == 1);
  const double step = 1e-6;
  Vector fd(2);
  for (Eigen::Index k = 0; k < 2; ++k) {
    ProjectionAngle up = a, down = a;
    up.theta(k) += step;
    down.theta(k) -= step;
    fd(k) = (phi(up, c, 0.6, pp, &lab) - phi(down, c, 0.6, pp, &lab)) / (2 * step);
  }
  CHECK((eval.grad - fd).norm() <= 1e-5 * fd.norm() + 1e-10);
}

TEST_CASE("projection index is symmetric under v -> -v and continuous") {
  std::mt19937_64 rng(51);
  const auto [c, mean] = center(Dataset(testing_support::gaussian_rows(rng, {{0, 0}, {4, 2}}, 30)));
  const auto pp = PenaltyParams::for_bandwidth(0.5, 0.7, 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Vector v = testing_support::random_unit(rng, 2);
    const double a = minimize_over_b(v, c, 0.5, pp, nullptr).value;
    const double b = minimize_over_b(Vector(-v), c, 0.5, pp, nullptr).value;
    CHECK(relative_gap(a, b) < 1e-9);

    ProjectionAngle t = unit_vector_to_angles(v);
    ProjectionAngle s = t;
    s.theta(0) += 1e-4 * (2 * unit(rng) - 1);
    const double lip = 10.0 * lipschitz_bound(0.5) * c.rows().rowwise().norm().maxCoeff();
    CHECK(std::abs(phi(t, c, 0.5, pp, nullptr) - phi(s, c, 0.5, pp, nullptr)) <=
          lip * std::abs(s.theta(0) - t.theta(0)));
  }
}

TEST_CASE("symmetric data has a zero gradient at the mirror direction") {
  Matrix m(8, 2);
  m << -3, 1, -3, -1, -2, 1, -2, -1, 2, 1, 2, -1, 3, 1, 3, -1;
  const Dataset ds(m);
  const auto pp = PenaltyParams::for_bandwidth(0.5, 0.9, 0.0);
  ProjectionAngle a{Vector(1)};
  a.theta << 0.0;
  const auto eval = phi_value_and_gradient(a, ds, 0.5, pp, nullptr);
  CHECK(std::abs(eval.grad(0)) < 1e-8);
}
