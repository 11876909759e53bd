#include "mdh/bfgs.hpp"

#include <cmath>
#include <limits>

namespace mdh {

std::string_view to_string(BfgsStatus status) {
  switch (status) {
    case BfgsStatus::kGradientTolerance: return "gradient_tolerance";
    case BfgsStatus::kSmallStep: return "small_step";
    case BfgsStatus::kMaxIterations: return "max_iterations";
    case BfgsStatus::kLineSearchFailed: return "linesearch_failed";
    case BfgsStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

bool finite(double f, const Vector& g) { return std::isfinite(f) && g.allFinite(); }

}  // namespace

BfgsResult bfgs_minimize(const GradientOracle& oracle, const Vector& x0,
                         const BfgsOptions& options) {
  const auto dim = x0.size();
  BfgsResult best;
  Vector x = x0;
  Vector g(dim);
  double f = oracle(x, Vector(), g);
  best.evaluations = 1;
  best.x = x;
  best.value = f;
  best.grad = g;
  if (!finite(f, g)) {
    best.status = BfgsStatus::kNumericalFailure;
    return best;
  }
  const double grad_tol =
      options.grad_tol * std::max(std::abs(f), std::numeric_limits<double>::min());

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
  bool scaled = false;
  best.status = BfgsStatus::kMaxIterations;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (g.norm() <= grad_tol) {
      best.status = BfgsStatus::kGradientTolerance;
      break;
    }
    Vector d = -hinv * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      d = -g;
      slope = -g.squaredNorm();
    }

    // Weak Wolfe bracketing: expand until sufficient decrease fails or the
    // curvature condition holds, then bisect.
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double t = 1.0;
    bool accepted = false;
    bool numerical = false;
    Vector x_new, g_new(dim), x_lo, g_lo(dim);
    double f_new = f, f_lo = f;
    for (int ls = 0; ls < options.max_linesearch; ++ls) {
      x_new = x + t * d;
      f_new = oracle(x_new, d, g_new);
      ++best.evaluations;
      if (!finite(f_new, g_new)) {
        numerical = true;
        break;
      }
      if (f_new > f + options.wolfe_c1 * t * slope) {
        hi = t;
      } else if (g_new.dot(d) < options.wolfe_c2 * slope) {
        lo = t;
        x_lo = x_new;
        g_lo = g_new;
        f_lo = f_new;
      } else {
        accepted = true;
        break;
      }
      t = std::isinf(hi) ? 2.0 * t : 0.5 * (lo + hi);
    }
    best.iterations = iter + 1;
    if (numerical) {
      best.status = BfgsStatus::kNumericalFailure;
      break;
    }
    if (!accepted) {
      if (lo > 0.0) {
        x_new = x_lo;
        g_new = g_lo;
        f_new = f_lo;
      } else {
        best.status = BfgsStatus::kLineSearchFailed;
        break;
      }
    }

    const Vector s = x_new - x;
    const Vector y = g_new - g;
    x = x_new;
    f = f_new;
    g = g_new;
    if (f < best.value) {
      best.x = x;
      best.value = f;
      best.grad = g;
    }
    if (s.norm() <= options.min_step) {
      best.status = BfgsStatus::kSmallStep;
      break;
    }

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    } else {
      hinv.setIdentity();
      scaled = false;
    }
  }
  return best;
}

}  // namespace mdh
