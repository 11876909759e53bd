#include "mdh/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "detail/search.hpp"

namespace mdh::oracles {

double full_kde(const Dataset& ds, double h, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != ds.d())
    throw std::invalid_argument("evaluation point has the wrong dimension");
  const double d = static_cast<double>(ds.d());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ds.rows().rows(); ++i) {
    const double r2 = (ds.rows().row(i).transpose() - x).squaredNorm();
    sum += std::exp(-r2 / (2.0 * h * h));
  }
  return sum / (static_cast<double>(ds.n()) * std::pow(2.0 * std::numbers::pi * h * h, d / 2.0));
}

double hyperplane_quadrature(const Dataset& ds, double h, const Hyperplane& hp,
                             const QuadratureSpec& quad) {
  if (ds.d() != 2) throw std::invalid_argument("line quadrature needs 2-D data");
  if (quad.nodes < 1001 || quad.nodes % 2 == 0)
    throw std::invalid_argument("quadrature needs an odd node count of at least 1001");
  const Vector v = hp.v.normalized();
  const Vector foot = hp.b * v;
  Vector along(2);
  along << -v(1), v(0);

  double radius = 0.0;
  for (Eigen::Index i = 0; i < ds.rows().rows(); ++i)
    radius = std::max(radius, (ds.rows().row(i).transpose() - foot).norm());
  const double half = quad.half_width * (radius + 6.0 * h);
  const double step = 2.0 * half / static_cast<double>(quad.nodes - 1);

  double sum = 0.0;
  for (std::size_t k = 0; k < quad.nodes; ++k) {
    const double t = -half + step * static_cast<double>(k);
    const double weight = (k == 0 || k + 1 == quad.nodes) ? 0.5 : 1.0;
    sum += weight * full_kde(ds, h, foot + t * along);
  }
  return sum * step;
}

std::pair<double, double> best_feasible_offset(const Vector& projections, double alpha) {
  std::vector<double> p(projections.data(), projections.data() + projections.size());
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double mean = 0.0;
  for (double x : p) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : p) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  // Offsets beyond the data would not split it; the mean keeps this nonempty.
  const double lo = std::max(mean - alpha * sd, p.front());
  const double hi = std::min(mean + alpha * sd, p.back());

  auto distance = [&](double b) {
    const auto it = std::lower_bound(p.begin(), p.end(), b);
    double best = std::numeric_limits<double>::infinity();
    if (it != p.end()) best = *it - b;
    if (it != p.begin()) best = std::min(best, b - *(it - 1));
    return best;
  };

  double best_b = lo;
  double best_m = distance(lo);
  auto consider = [&](double b) {
    const double m = distance(b);
    if (m > best_m) {
      best_m = m;
      best_b = b;
    }
  };
  consider(hi);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (p[k + 1] < lo || p[k] > hi) continue;
    consider(std::clamp(0.5 * (p[k] + p[k + 1]), lo, hi));
  }
  return {best_b, best_m};
}

namespace {

Vector direction_at(double angle) {
  Vector v(2);
  v << std::cos(angle), std::sin(angle);
  return v;
}

}  // namespace

MaxMarginResult brute_force_max_margin(const Dataset& ds, double alpha, std::size_t angle_grid,
                                       std::size_t b_grid, std::uint64_t seed) {
  if (angle_grid < 2) throw std::invalid_argument("angle grid needs at least 2 points");

  auto evaluate = [&](const Vector& v, MaxMarginResult& best) {
    const Vector p = project(ds, v);
    auto [b, m] = best_feasible_offset(p, alpha);
    if (b_grid > 0) {
      const double mean = p.mean();
      const double sd = std::sqrt((p.array() - mean).square().mean());
      for (std::size_t k = 0; k < b_grid; ++k) {
        const double frac =
            b_grid == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(b_grid - 1);
        const double c = std::clamp(mean + alpha * sd * (2.0 * frac - 1.0), p.minCoeff(),
                                    p.maxCoeff());
        const double mc = (p.array() - c).abs().minCoeff();
        if (mc > m) {
          m = mc;
          b = c;
        }
      }
    }
    if (m > best.margin) best = {{v, b}, m, best.exact};
    return m;
  };

  MaxMarginResult best;
  best.margin = -1.0;
  if (ds.d() == 2) {
    const double step = std::numbers::pi / static_cast<double>(angle_grid);
    double best_angle = 0.0;
    for (std::size_t k = 0; k < angle_grid; ++k) {
      const double a = step * static_cast<double>(k);
      const double before = best.margin;
      evaluate(direction_at(a), best);
      if (best.margin > before) best_angle = a;
    }
    auto negative_margin = [&](double a) {
      MaxMarginResult scratch;
      scratch.margin = -1.0;
      return -evaluate(direction_at(a), scratch);
    };
    const double refined =
        detail::golden_minimize(negative_margin, best_angle - step, best_angle + step, 1e-10);
    evaluate(direction_at(refined), best);
  } else {
    best.exact = false;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(ds.d()));
    for (std::size_t k = 0; k < angle_grid; ++k) {
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = normal(rng);
      if (v.norm() < 1e-12) continue;
      evaluate(v.normalized(), best);
    }
  }
  best.hyperplane = best.hyperplane.canonical();
  return best;
}

}  // namespace mdh::oracles
