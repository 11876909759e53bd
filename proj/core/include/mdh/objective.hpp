#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mdh/dataset.hpp"
#include "mdh/geometry.hpp"
#include "mdh/kde1d.hpp"
#include "mdh/types.hpp"

namespace mdh {

struct PenaltyParams {
  double alpha = 0.0;             // feasible interval half-width in standard deviations
  double eta = 1e-2;              // accuracy of the penalised minimisers
  double epsilon = 1.0 - 1e-6;    // penalty exponent offset
  double lipschitz = 1.0;         // L, slope bound of Î for the active bandwidth
  double gamma = 0.0;             // label penalty weight; 0 for clustering

  static PenaltyParams for_bandwidth(double h, double alpha, double gamma = 0.0,
                                     double eta = 1e-2, double epsilon = 1.0 - 1e-6);
  // Throws std::invalid_argument when out of range.
  void validate() const;
};

struct FeasibleInterval {
  double mean = 0.0;
  double sd = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double b) const noexcept { return b >= lo && b <= hi; }
};

// [mean - alpha sd, mean + alpha sd] with the population standard deviation.
FeasibleInterval feasible_interval(std::span<const double> projections, double alpha);

// The penalised density integral along b for one fixed direction.
class PenalizedProfile {
 public:
  // `labeled` rows index into `projections`; ignored unless pp.gamma > 0.
  PenalizedProfile(std::vector<double> projections, double h, const PenaltyParams& pp,
                   const LabeledSubset* labeled = nullptr);

  double value(double b) const { return density(b) + penalty(b); }
  double derivative(double b) const;
  double density(double b) const { return density_integral(kde_, b); }
  double boundary_penalty(double b) const;
  double label_penalty(double b) const;
  double penalty(double b) const { return boundary_penalty(b) + label_penalty(b); }

  // Signed distance outside the feasible interval (0 inside).
  double excess(double b) const;

  const ProjectedKde& kde() const noexcept { return kde_; }
  const FeasibleInterval& interval() const noexcept { return interval_; }
  const PenaltyParams& params() const noexcept { return pp_; }
  bool has_labels() const noexcept { return !label_index_.empty(); }
  std::span<const std::size_t> label_index() const noexcept { return label_index_; }
  std::span<const int> label_sign() const noexcept { return label_sign_; }
  double penalty_scale() const noexcept { return penalty_scale_; }

 private:
  ProjectedKde kde_;
  PenaltyParams pp_;
  FeasibleInterval interval_;
  double penalty_scale_;  // L / eta^epsilon
  std::vector<std::size_t> label_index_;
  std::vector<int> label_sign_;
};

double f_cl(const Vector& v, double b, const Dataset& ds, double h, const PenaltyParams& pp);
double f_ssc(const Vector& v, double b, const Dataset& ds, const LabeledSubset& labeled, double h,
             const PenaltyParams& pp);

struct SearchWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// Range of b scanned by the inner minimisation: the projection range and the
// feasible interval, widened by eta on both sides.
SearchWindow search_window(const PenalizedProfile& profile);

struct InnerOptions {
  std::size_t grid_size = 256;
  GridMode grid_mode = GridMode::kDirect;
};

struct InnerSolution {
  double b_star = 0.0;
  double value = 0.0;
  // Refined minimisers whose value ties with the global minimum, ascending.
  std::vector<double> minimizer_set;
  // Every refined local minimiser of the penalised profile, ascending.
  std::vector<double> local_minima;
  bool is_density_minimizer = false;
  SearchWindow window;
  double tol_b = 0.0;
};

InnerSolution minimize_over_b(const PenalizedProfile& profile, const InnerOptions& options = {});
InnerSolution minimize_over_b(const Vector& v, const Dataset& ds, double h, const PenaltyParams& pp,
                              const LabeledSubset* labeled = nullptr,
                              const InnerOptions& options = {});

// Gradient of f(v, b) with respect to v at fixed b (through the projections,
// mean and standard deviation, and labelled rows).
Vector gradient_wrt_v(const Dataset& ds, const PenalizedProfile& profile, double b);

struct PhiEvaluation {
  double value = 0.0;
  Vector grad;  // with respect to the projection angle
  Vector v;
  double b = 0.0;  // minimiser the gradient was taken at
  InnerSolution inner;
};

// Projection index min_b f(v(theta), b) and its gradient in theta. With
// several tied minimisers the gradient is taken at the one with the smallest
// directional derivative along `step` when given, else at the smallest b.
PhiEvaluation phi_value_and_gradient(const ProjectionAngle& theta, const Dataset& ds, double h,
                                     const PenaltyParams& pp, const LabeledSubset* labeled = nullptr,
                                     const InnerOptions& options = {},
                                     const Vector* step = nullptr);

}  // namespace mdh
