#pragma once

#include <vector>

#include "mdh/dataset.hpp"
#include "mdh/types.hpp"

namespace mdh {

// H(v, b) = {x : v.x = b} with unit normal v.
struct Hyperplane {
  Vector v;
  double b = 0.0;

  // Representative with the largest-magnitude coordinate of v positive.
  Hyperplane canonical() const;
};

// True when a and b describe the same point set within tol, treating
// (v, b) and (-v, -b) as equal.
bool same_hyperplane(const Hyperplane& a, const Hyperplane& b, double tol);

// min over the two sign representatives of ||(v, b) - (w, c)||.
double hyperplane_distance(const Hyperplane& a, const Hyperplane& b);

// Spherical coordinates of a unit vector: theta_1..theta_{d-2} in [0, pi],
// theta_{d-1} in [0, 2pi). The map to v is periodic, so any real vector is
// accepted by angles_to_unit_vector.
struct ProjectionAngle {
  Vector theta;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(theta.size()) + 1; }
};

Vector angles_to_unit_vector(const ProjectionAngle& angle);

// Inverse of angles_to_unit_vector. When a tail of v is zero the remaining
// angles are 0. Throws std::invalid_argument for non-unit input.
ProjectionAngle unit_vector_to_angles(const Vector& v);

// Maps an arbitrary angle vector to its representative inside the range.
ProjectionAngle normalize_angles(const ProjectionAngle& angle);

// d x (d-1) derivative of v(theta).
Matrix jacobian(const ProjectionAngle& angle);

Vector project(const Matrix& points, const Vector& v);
inline Vector project(const Dataset& ds, const Vector& v) { return project(ds.rows(), v); }

double margin(const Matrix& points, const Hyperplane& hp);
inline double margin(const Dataset& ds, const Hyperplane& hp) { return margin(ds.rows(), hp); }

// sign(v.x - b) per row; v.x == b goes to +1.
std::vector<int> partition(const Matrix& points, const Hyperplane& hp);
inline std::vector<int> partition(const Dataset& ds, const Hyperplane& hp) {
  return partition(ds.rows(), hp);
}

}  // namespace mdh
