#include "mdh/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdh {

Hyperplane Hyperplane::canonical() const {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) return Hyperplane{-v, -b};
  return *this;
}

double hyperplane_distance(const Hyperplane& a, const Hyperplane& b) {
  const double same = std::sqrt((a.v - b.v).squaredNorm() + (a.b - b.b) * (a.b - b.b));
  const double flip = std::sqrt((a.v + b.v).squaredNorm() + (a.b + b.b) * (a.b + b.b));
  return std::min(same, flip);
}

bool same_hyperplane(const Hyperplane& a, const Hyperplane& b, double tol) {
  return a.v.size() == b.v.size() && hyperplane_distance(a, b) <= tol;
}

Vector angles_to_unit_vector(const ProjectionAngle& angle) {
  const auto m = angle.theta.size();
  Vector v(m + 1);
  double sin_prod = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    v(i) = std::cos(angle.theta(i)) * sin_prod;
    sin_prod *= std::sin(angle.theta(i));
  }
  v(m) = sin_prod;
  return v;
}

ProjectionAngle unit_vector_to_angles(const Vector& v) {
  const auto d = v.size();
  if (d < 2) throw std::invalid_argument("unit_vector_to_angles: need d >= 2");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("unit_vector_to_angles: input is not a unit vector");

  // tail(i) = ||(v_i, ..., v_d)||
  Vector tail(d + 1);
  tail(d) = 0.0;
  for (Eigen::Index i = d - 1; i >= 0; --i) tail(i) = std::hypot(tail(i + 1), v(i));

  ProjectionAngle out{Vector::Zero(d - 1)};
  for (Eigen::Index i = 0; i + 1 < d - 1; ++i) {
    if (tail(i) == 0.0) return out;
    out.theta(i) = std::atan2(tail(i + 1), v(i));
  }
  double last = std::atan2(v(d - 1), v(d - 2));
  if (last < 0) last += 2.0 * std::numbers::pi;
  out.theta(d - 2) = last;
  return out;
}

ProjectionAngle normalize_angles(const ProjectionAngle& angle) {
  Vector v = angles_to_unit_vector(angle);
  v.normalize();
  return unit_vector_to_angles(v);
}

Matrix jacobian(const ProjectionAngle& angle) {
  const auto m = angle.theta.size();
  const auto d = m + 1;
  Vector s(m), c(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s(k) = std::sin(angle.theta(k));
    c(k) = std::cos(angle.theta(k));
  }
  // Product of sines over j < i, skipping index `skip`.
  auto sin_prod = [&](Eigen::Index upto, Eigen::Index skip) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < upto; ++j)
      if (j != skip) p *= s(j);
    return p;
  };

  Matrix jac = Matrix::Zero(d, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < i; ++k) jac(i, k) = c(i) * c(k) * sin_prod(i, k);
    jac(i, i) = -s(i) * sin_prod(i, -1);
  }
  for (Eigen::Index k = 0; k < m; ++k) jac(m, k) = c(k) * sin_prod(m, k);
  return jac;
}

Vector project(const Matrix& points, const Vector& v) {
  if (points.cols() != v.size()) throw std::invalid_argument("project: dimension mismatch");
  return points * v;
}

double margin(const Matrix& points, const Hyperplane& hp) {
  return (project(points, hp.v).array() - hp.b).abs().minCoeff();
}

std::vector<int> partition(const Matrix& points, const Hyperplane& hp) {
  const Vector p = project(points, hp.v);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) - hp.b >= 0.0 ? 1 : -1;
  return out;
}

}  // namespace mdh
