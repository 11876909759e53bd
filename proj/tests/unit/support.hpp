#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mdh/dataset.hpp"
#include "mdh/types.hpp"

namespace testing_support {

inline mdh::Matrix gaussian_rows(std::mt19937_64& rng, const std::vector<std::vector<double>>& centres,
                                 int per_centre, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  const auto d = static_cast<Eigen::Index>(centres.front().size());
  mdh::Matrix rows(static_cast<Eigen::Index>(centres.size()) * per_centre, d);
  Eigen::Index r = 0;
  for (const auto& c : centres)
    for (int i = 0; i < per_centre; ++i, ++r)
      for (Eigen::Index j = 0; j < d; ++j) rows(r, j) = c[static_cast<std::size_t>(j)] + normal(rng);
  return rows;
}

inline mdh::Vector random_unit(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  mdh::Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v(j) = normal(rng);
  return v.normalized();
}

// Straight transcription of the one-dimensional kernel sum, kept apart from
// the library so it can serve as a reference.
inline double reference_kde(const std::vector<double>& p, double h, double b) {
  double s = 0.0;
  for (double x : p) s += std::exp(-(b - x) * (b - x) / (2.0 * h * h));
  return s / (static_cast<double>(p.size()) * std::sqrt(2.0 * std::numbers::pi) * h);
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testing_support
