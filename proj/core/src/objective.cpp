#include "mdh/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/search.hpp"

namespace mdh {

PenaltyParams PenaltyParams::for_bandwidth(double h, double alpha, double gamma, double eta,
                                           double epsilon) {
  PenaltyParams pp;
  pp.alpha = alpha;
  pp.eta = eta;
  pp.epsilon = epsilon;
  pp.lipschitz = lipschitz_bound(h);
  pp.gamma = gamma;
  return pp;
}

void PenaltyParams::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
}

FeasibleInterval feasible_interval(std::span<const double> projections, double alpha) {
  const double n = static_cast<double>(projections.size());
  double mean = 0.0;
  for (double p : projections) mean += p;
  mean /= n;
  double ss = 0.0;
  for (double p : projections) ss += (p - mean) * (p - mean);
  const double sd = std::sqrt(ss / n);
  return {mean, sd, mean - alpha * sd, mean + alpha * sd};
}

PenalizedProfile::PenalizedProfile(std::vector<double> projections, double h,
                                   const PenaltyParams& pp, const LabeledSubset* labeled)
    : kde_(std::move(projections), h),
      pp_(pp),
      interval_(feasible_interval(kde_.points(), pp.alpha)),
      penalty_scale_(pp.lipschitz / std::pow(pp.eta, pp.epsilon)) {
  pp_.validate();
  if (labeled && pp.gamma > 0.0) {
    validate_labels(*labeled, kde_.size());
    label_index_ = labeled->indices;
    label_sign_ = labeled->labels;
  }
}

double PenalizedProfile::excess(double b) const {
  if (b > interval_.hi) return b - interval_.hi;
  if (b < interval_.lo) return interval_.lo - b;
  return 0.0;
}

double PenalizedProfile::boundary_penalty(double b) const {
  const double t = excess(b);
  return t > 0.0 ? penalty_scale_ * std::pow(t, 1.0 + pp_.epsilon) : 0.0;
}

double PenalizedProfile::label_penalty(double b) const {
  double sum = 0.0;
  const auto p = kde_.points();
  for (std::size_t k = 0; k < label_index_.size(); ++k) {
    const double u = -label_sign_[k] * (p[label_index_[k]] - b);
    if (u > 0.0) sum += std::pow(u, 1.0 + pp_.epsilon);
  }
  return pp_.gamma * sum;
}

double PenalizedProfile::derivative(double b) const {
  double d = d_integral_db(kde_, b);
  const double t = excess(b);
  if (t > 0.0) {
    const double slope = penalty_scale_ * (1.0 + pp_.epsilon) * std::pow(t, pp_.epsilon);
    d += b > interval_.hi ? slope : -slope;
  }
  const auto p = kde_.points();
  for (std::size_t k = 0; k < label_index_.size(); ++k) {
    const double u = -label_sign_[k] * (p[label_index_[k]] - b);
    if (u > 0.0) d += pp_.gamma * (1.0 + pp_.epsilon) * std::pow(u, pp_.epsilon) * label_sign_[k];
  }
  return d;
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

double f_cl(const Vector& v, double b, const Dataset& ds, double h, const PenaltyParams& pp) {
  PenaltyParams clustering = pp;
  clustering.gamma = 0.0;
  return PenalizedProfile(to_std(project(ds, v)), h, clustering).value(b);
}

double f_ssc(const Vector& v, double b, const Dataset& ds, const LabeledSubset& labeled, double h,
             const PenaltyParams& pp) {
  return PenalizedProfile(to_std(project(ds, v)), h, pp, &labeled).value(b);
}

SearchWindow search_window(const PenalizedProfile& profile) {
  const double eta = profile.params().eta;
  const auto& iv = profile.interval();
  return {std::min(profile.kde().min_point(), iv.lo) - eta,
          std::max(profile.kde().max_point(), iv.hi) + eta};
}

InnerSolution minimize_over_b(const PenalizedProfile& profile, const InnerOptions& options) {
  const std::size_t m = std::max<std::size_t>(options.grid_size, 32);
  const SearchWindow window = search_window(profile);
  const double width = window.hi - window.lo;
  const double tol_b = 1e-8 * width;
  // Refined well below tol_b: where the boundary penalty is active the
  // profile is steep, and an offset error of tol_b would show up in phi at a
  // level that spoils finite-difference agreement of its gradient.
  const double refine_tol = 1e-6 * tol_b;

  const auto grid = linspace(window.lo, window.hi, m);
  const auto density = grid_evaluate(profile.kde(), window.lo, window.hi, m, options.grid_mode);
  std::vector<double> f(m);
  for (std::size_t k = 0; k < m; ++k) f[k] = density[k] + profile.penalty(grid[k]);

  auto value = [&](double b) { return profile.value(b); };
  auto deriv = [&](double b) { return profile.derivative(b); };

  // Grid minima: endpoints that beat their neighbour, and interior turns from
  // decreasing to increasing (flat stretches skipped).
  std::vector<double> candidates;
  if (f[0] < f[1]) candidates.push_back(grid[0]);
  int prev_sign = 0;
  std::size_t prev_k = 0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double diff = f[k + 1] - f[k];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign < 0 && sign > 0)
      candidates.push_back(
          detail::refine_extremum(value, deriv, grid[prev_k], grid[k + 1], refine_tol, true));
    prev_k = k;
    prev_sign = sign;
  }
  if (f[m - 1] < f[m - 2]) candidates.push_back(grid[m - 1]);
  if (candidates.empty()) {
    // Flat profile (everything underflowed): take the grid argmin.
    candidates.push_back(grid[static_cast<std::size_t>(
        std::min_element(f.begin(), f.end()) - f.begin())]);
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> values(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) values[k] = value(candidates[k]);
  const double global = *std::min_element(values.begin(), values.end());
  const double tol_tie = 1e-9 * std::abs(global) + std::numeric_limits<double>::min();

  InnerSolution sol;
  sol.window = window;
  sol.tol_b = tol_b;
  sol.local_minima = candidates;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (values[k] <= global + tol_tie) sol.minimizer_set.push_back(candidates[k]);
  sol.b_star = sol.minimizer_set.front();
  sol.value = value(sol.b_star);

  // Is b_star also a local minimiser of the unpenalised density? Only the
  // density-grid brackets that can contain b_star are refined.
  prev_sign = 0;
  prev_k = 0;
  for (std::size_t k = 0; k + 1 < m && !sol.is_density_minimizer; ++k) {
    const double diff = density[k + 1] - density[k];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign < 0 && sign > 0 && sol.b_star >= grid[prev_k] - tol_b &&
        sol.b_star <= grid[k + 1] + tol_b) {
      const double loc = detail::refine_extremum(
          [&](double b) { return profile.density(b); },
          [&](double b) { return d_integral_db(profile.kde(), b); }, grid[prev_k], grid[k + 1],
          refine_tol, true);
      sol.is_density_minimizer = std::abs(loc - sol.b_star) <= tol_b;
    }
    prev_k = k;
    prev_sign = sign;
  }
  return sol;
}

InnerSolution minimize_over_b(const Vector& v, const Dataset& ds, double h, const PenaltyParams& pp,
                              const LabeledSubset* labeled, const InnerOptions& options) {
  return minimize_over_b(PenalizedProfile(to_std(project(ds, v)), h, pp, labeled), options);
}

Vector gradient_wrt_v(const Dataset& ds, const PenalizedProfile& profile, double b) {
  const auto n = static_cast<Eigen::Index>(ds.n());
  const auto p = profile.kde().points();
  const auto& pp = profile.params();
  const auto& iv = profile.interval();

  // grad_v f = X^T w, with w collecting every per-row coefficient.
  Vector w(n);
  const auto gp = d_integral_dpoints(profile.kde(), b);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = gp[static_cast<std::size_t>(i)];

  const double t = profile.excess(b);
  if (t > 0.0) {
    // d mu / dv = mean row; d sd / dv = Sigma v / sd = X^T (p - mu) / (n sd).
    const double k = profile.penalty_scale() * (1.0 + pp.epsilon) * std::pow(t, pp.epsilon);
    const double c_mean = b > iv.hi ? -k : k;
    const double c_sd = -pp.alpha * k;
    const double nn = static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i) += c_mean / nn;
      if (iv.sd > 0.0) w(i) += c_sd * (p[static_cast<std::size_t>(i)] - iv.mean) / (nn * iv.sd);
    }
  }

  const auto idx = profile.label_index();
  const auto sign = profile.label_sign();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double u = -sign[k] * (p[idx[k]] - b);
    if (u > 0.0)
      w(static_cast<Eigen::Index>(idx[k])) -=
          pp.gamma * (1.0 + pp.epsilon) * std::pow(u, pp.epsilon) * sign[k];
  }
  return ds.rows().transpose() * w;
}

PhiEvaluation phi_value_and_gradient(const ProjectionAngle& theta, const Dataset& ds, double h,
                                     const PenaltyParams& pp, const LabeledSubset* labeled,
                                     const InnerOptions& options, const Vector* step) {
  PhiEvaluation out;
  out.v = angles_to_unit_vector(theta);
  const PenalizedProfile profile(to_std(project(ds, out.v)), h, pp, labeled);
  out.inner = minimize_over_b(profile, options);
  out.value = out.inner.value;

  const Matrix jac = jacobian(theta);
  out.b = out.inner.b_star;
  out.grad = jac.transpose() * gradient_wrt_v(ds, profile, out.b);

  if (step && out.inner.minimizer_set.size() > 1) {
    double best = out.grad.dot(*step);
    for (double b : out.inner.minimizer_set) {
      if (b == out.b) continue;
      Vector g = jac.transpose() * gradient_wrt_v(ds, profile, b);
      const double slope = g.dot(*step);
      if (slope < best) {
        best = slope;
        out.grad = std::move(g);
        out.b = b;
      }
    }
  }
  return out;
}

}  // namespace mdh
