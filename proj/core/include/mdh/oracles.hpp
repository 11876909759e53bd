#pragma once

#include <cstddef>
#include <cstdint>

#include "mdh/dataset.hpp"
#include "mdh/geometry.hpp"
#include "mdh/types.hpp"

// Slow, direct references used to check the fast paths.
namespace mdh::oracles {

// Full-dimensional isotropic Gaussian KDE at x.
double full_kde(const Dataset& ds, double h, const Vector& x);

struct QuadratureSpec {
  double half_width = 1.0;    // multiples of (data radius about the line's foot + 6h)
  std::size_t nodes = 20001;  // odd, at least 1001
};

// Trapezoid rule for the KDE integrated along a line in the plane. Throws
// std::invalid_argument unless d == 2.
double hyperplane_quadrature(const Dataset& ds, double h, const Hyperplane& hp,
                             const QuadratureSpec& quad = {});

struct MaxMarginResult {
  Hyperplane hyperplane;
  double margin = 0.0;
  bool exact = true;  // false when d > 2 (random directions only)
};

// Offset in [mean - alpha sd, mean + alpha sd], restricted to the span of the
// projections so the hyperplane splits the data, that is farthest from every
// projection, with that distance.
std::pair<double, double> best_feasible_offset(const Vector& projections, double alpha);

// Maximum-margin hyperplane with offset constrained to the feasible interval.
// In the plane: a scan over angle_grid angles in [0, pi), the best refined by
// golden-section search; b_grid extra offsets per angle are also tried.
MaxMarginResult brute_force_max_margin(const Dataset& ds, double alpha,
                                       std::size_t angle_grid = 3600, std::size_t b_grid = 0,
                                       std::uint64_t seed = 0);

}  // namespace mdh::oracles
