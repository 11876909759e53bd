#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdh/types.hpp"

namespace mdh {

// One-dimensional Gaussian KDE over projections p_i = v.x_i with bandwidth h.
// Its value at b is the integral of the full-dimensional isotropic KDE along
// the hyperplane H(v, b).
class ProjectedKde {
 public:
  ProjectedKde(std::vector<double> points, double h);
  ProjectedKde(const Vector& points, double h);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double h() const noexcept { return h_; }
  double min_point() const noexcept { return min_; }
  double max_point() const noexcept { return max_; }

 private:
  std::vector<double> points_;
  double h_;
  double min_ = 0.0;
  double max_ = 0.0;
};

// Î(v, b) = 1/(n sqrt(2 pi h^2)) sum exp(-(b - p_i)^2 / (2 h^2)).
double density_integral(const ProjectedKde& kde, double b);

double d_integral_db(const ProjectedKde& kde, double b);

// Gradient of Î(v, b) with respect to each projection p_i.
std::vector<double> d_integral_dpoints(const ProjectedKde& kde, double b);

// (e^{1/2} h^2 sqrt(2 pi))^{-1}: the largest slope a Gaussian KDE with
// bandwidth h can have.
double lipschitz_bound(double h);

enum class GridMode {
  kDirect,  // exact O(mn) summation
  kBinned,  // points linearly binned onto 4m centres first
};

// Values at m equally spaced points on [lo, hi], endpoints included.
std::vector<double> grid_evaluate(const ProjectedKde& kde, double lo, double hi, std::size_t m,
                                  GridMode mode = GridMode::kDirect);

std::vector<double> linspace(double lo, double hi, std::size_t m);

enum class ExtremumKind { kMin, kMax };

struct Extremum {
  double location;
  double value;
  ExtremumKind kind;
};

// Grid scan for sign changes of the discrete difference, each bracket refined
// by bisection on d_integral_db. Sorted by location with alternating kinds.
std::vector<Extremum> find_local_extrema(const ProjectedKde& kde, double lo, double hi,
                                         std::size_t m);

// Same, reusing values already evaluated on linspace(lo, hi, values.size()).
std::vector<Extremum> extrema_from_grid(const ProjectedKde& kde, double lo, double hi,
                                        std::span<const double> values, double tol);

}  // namespace mdh
