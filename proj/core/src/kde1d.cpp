#include "mdh/kde1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "detail/search.hpp"

namespace mdh {

namespace {

constexpr double kUnderflowExponent = -700.0;
// Beyond this many bandwidths the kernel has underflowed (37.5^2 / 2 > 700).
constexpr double kKernelReach = 37.5;

inline double gauss(double z2_half) {
  return z2_half < kUnderflowExponent ? 0.0 : std::exp(z2_half);
}

}  // namespace

ProjectedKde::ProjectedKde(std::vector<double> points, double h) : points_(std::move(points)), h_(h) {
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw std::invalid_argument("bandwidth must be positive");
  if (points_.empty()) throw std::invalid_argument("ProjectedKde needs at least one point");
  for (double p : points_)
    if (!std::isfinite(p)) throw std::invalid_argument("ProjectedKde: non-finite projection");
  const auto [lo, hi] = std::minmax_element(points_.begin(), points_.end());
  min_ = *lo;
  max_ = *hi;
}

ProjectedKde::ProjectedKde(const Vector& points, double h)
    : ProjectedKde(std::vector<double>(points.data(), points.data() + points.size()), h) {}

double density_integral(const ProjectedKde& kde, double b) {
  const double h = kde.h();
  const double inv2h2 = 1.0 / (2.0 * h * h);
  double sum = 0.0;
  for (double p : kde.points()) {
    const double u = b - p;
    sum += gauss(-u * u * inv2h2);
  }
  return sum / (static_cast<double>(kde.size()) * std::sqrt(2.0 * std::numbers::pi) * h);
}

double d_integral_db(const ProjectedKde& kde, double b) {
  const double h = kde.h();
  const double inv2h2 = 1.0 / (2.0 * h * h);
  double sum = 0.0;
  for (double p : kde.points()) {
    const double u = b - p;
    sum += u * gauss(-u * u * inv2h2);
  }
  return -sum / (static_cast<double>(kde.size()) * std::sqrt(2.0 * std::numbers::pi) * h * h * h);
}

std::vector<double> d_integral_dpoints(const ProjectedKde& kde, double b) {
  const double h = kde.h();
  const double inv2h2 = 1.0 / (2.0 * h * h);
  const double scale =
      1.0 / (static_cast<double>(kde.size()) * std::sqrt(2.0 * std::numbers::pi) * h * h * h);
  std::vector<double> out;
  out.reserve(kde.size());
  for (double p : kde.points()) {
    const double u = b - p;
    out.push_back(scale * u * gauss(-u * u * inv2h2));
  }
  return out;
}

double lipschitz_bound(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  return 1.0 / (std::exp(0.5) * h * h * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<double> linspace(double lo, double hi, std::size_t m) {
  std::vector<double> out(m);
  if (m == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < m; ++k) out[k] = lo + step * static_cast<double>(k);
  out[m - 1] = hi;
  return out;
}

namespace {

std::vector<double> binned_evaluate(const ProjectedKde& kde, const std::vector<double>& grid) {
  const std::size_t nbins = 4 * grid.size();
  const double lo = std::min(grid.front(), kde.min_point());
  const double hi = std::max(grid.back(), kde.max_point());
  const double width = (hi - lo) / static_cast<double>(nbins - 1);
  std::vector<double> weight(nbins, 0.0);
  if (width <= 0.0) {
    weight[0] = static_cast<double>(kde.size());
  } else {
    for (double p : kde.points()) {
      const double pos = (p - lo) / width;
      const auto left = std::min(static_cast<std::size_t>(pos), nbins - 2);
      const double frac = pos - static_cast<double>(left);
      weight[left] += 1.0 - frac;
      weight[left + 1] += frac;
    }
  }

  const double h = kde.h();
  const double inv2h2 = 1.0 / (2.0 * h * h);
  const double norm = 1.0 / (static_cast<double>(kde.size()) * std::sqrt(2.0 * std::numbers::pi) * h);
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    std::size_t first = 0, last = nbins;
    if (width > 0.0) {
      const double a = std::floor((x - kKernelReach * h - lo) / width);
      const double b = std::ceil((x + kKernelReach * h - lo) / width);
      first = static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(nbins)));
      last = static_cast<std::size_t>(std::clamp(b + 1.0, 0.0, static_cast<double>(nbins)));
    }
    double sum = 0.0;
    for (std::size_t c = first; c < last; ++c) {
      if (weight[c] == 0.0) continue;
      const double u = x - (lo + width * static_cast<double>(c));
      sum += weight[c] * gauss(-u * u * inv2h2);
    }
    out[k] = sum * norm;
  }
  return out;
}

}  // namespace

std::vector<double> grid_evaluate(const ProjectedKde& kde, double lo, double hi, std::size_t m,
                                  GridMode mode) {
  if (!(lo < hi)) throw std::invalid_argument("grid_evaluate: need lo < hi");
  if (m < 2) throw std::invalid_argument("grid_evaluate: need m >= 2");
  const auto grid = linspace(lo, hi, m);
  if (mode == GridMode::kBinned) return binned_evaluate(kde, grid);
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = density_integral(kde, grid[k]);
  return out;
}

std::vector<Extremum> extrema_from_grid(const ProjectedKde& kde, double lo, double hi,
                                        std::span<const double> values, double tol) {
  const std::size_t m = values.size();
  const auto grid = linspace(lo, hi, m);
  std::vector<Extremum> out;
  int prev_sign = 0;
  std::size_t prev_k = 0;  // left end of the last non-flat grid segment
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double diff = values[k + 1] - values[k];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      const bool is_min = prev_sign < 0;
      const double loc = detail::refine_extremum(
          [&](double x) { return density_integral(kde, x); },
          [&](double x) { return d_integral_db(kde, x); }, grid[prev_k], grid[k + 1], tol,
          is_min);
      out.push_back({loc, density_integral(kde, loc), is_min ? ExtremumKind::kMin : ExtremumKind::kMax});
    }
    prev_k = k;
    prev_sign = sign;
  }
  return out;
}

std::vector<Extremum> find_local_extrema(const ProjectedKde& kde, double lo, double hi,
                                         std::size_t m) {
  if (m < 16) throw std::invalid_argument("find_local_extrema: need m >= 16");
  const auto values = grid_evaluate(kde, lo, hi, m);
  return extrema_from_grid(kde, lo, hi, values, 0.25e-8 * (hi - lo));
}

}  // namespace mdh
