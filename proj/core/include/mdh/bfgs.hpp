#pragma once

#include <functional>
#include <string_view>

#include "mdh/types.hpp"

namespace mdh {

struct BfgsOptions {
  int max_iter = 100;
  // Stop once ||grad|| <= grad_tol * max(|f(x0)|, tiny): the projection
  // index scales like 1/(data scale), so an absolute tolerance is meaningless.
  double grad_tol = 1e-6;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_linesearch = 40;
  double min_step = 1e-12;
};

enum class BfgsStatus {
  kGradientTolerance,
  kSmallStep,
  kMaxIterations,
  kLineSearchFailed,
  kNumericalFailure,
};

std::string_view to_string(BfgsStatus status);

struct BfgsResult {
  Vector x;
  double value = 0.0;
  Vector grad;
  int iterations = 0;
  int evaluations = 0;
  BfgsStatus status = BfgsStatus::kMaxIterations;
};

// Objective callback: returns f(x) and writes the gradient. `direction` is
// the current search direction (empty on the first call), so nonsmooth
// objectives can pick the relevant one-sided gradient.
using GradientOracle =
    std::function<double(const Vector& x, const Vector& direction, Vector& grad)>;

// BFGS with a weak-Wolfe bracketing line search, usable on nonsmooth
// objectives. Returns the best iterate seen; its value never exceeds f(x0).
BfgsResult bfgs_minimize(const GradientOracle& oracle, const Vector& x0,
                         const BfgsOptions& options = {});

}  // namespace mdh
