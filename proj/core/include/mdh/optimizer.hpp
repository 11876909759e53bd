#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdh/bfgs.hpp"
#include "mdh/dataset.hpp"
#include "mdh/geometry.hpp"
#include "mdh/kde1d.hpp"
#include "mdh/objective.hpp"

namespace mdh {

enum class InitKind { kPc1, kPc2, kSvm, kRandom, kExplicit };

struct InitSpec {
  InitKind kind = InitKind::kPc1;
  Vector direction;  // kExplicit only, in working (centred) coordinates

  std::string tag() const;
};

// {0.01, 0.1, 0.2, ..., alpha_max}
std::vector<double> alpha_schedule_up_to(double alpha_max);

struct MdhConfig {
  std::optional<double> h;  // bandwidth; default rule when absent
  std::vector<double> alpha_schedule = alpha_schedule_up_to(0.9);
  double alpha_max = 0.9;
  std::vector<double> gamma_schedule = {0.1, 1.0, 10.0};
  double eta = 1e-2;
  double epsilon = 1.0 - 1e-6;
  InnerOptions inner;
  BfgsOptions bfgs;
  std::vector<InitSpec> inits = {{InitKind::kPc1, {}}, {InitKind::kPc2, {}}};
  std::size_t random_inits = 0;  // appended after `inits`
  std::uint64_t seed = 0;
  bool standardize = false;
  std::size_t depth_grid = 1024;
  unsigned threads = 0;  // 0: MDH_THREADS or hardware concurrency

  // Throws InputError on inconsistent settings.
  void validate() const;
};

struct StageRecord {
  double alpha = 0.0;
  double gamma = 0.0;
  double phi_start = 0.0;
  double phi_end = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double grad_norm = 0.0;
  std::string status;
  Hyperplane hyperplane;  // working coordinates
  bool is_density_minimizer = false;
  double seconds = 0.0;
};

struct InitRun {
  std::string tag;
  std::vector<StageRecord> stages;
  std::size_t selected_stage = 0;
  Hyperplane hyperplane;  // working coordinates
  double density_integral = 0.0;
  double relative_depth = 0.0;
  bool is_density_minimizer = false;
};

struct MdhResult {
  Hyperplane hyperplane;          // original coordinates
  Hyperplane working_hyperplane;  // after centring (and scaling, if enabled)
  double h = 0.0;
  double density_integral = 0.0;  // Î at the solution, working coordinates
  double relative_depth = 0.0;
  bool is_density_minimizer = false;
  std::vector<int> partition;
  std::string init_tag;
  std::size_t init_index = 0;
  std::vector<StageRecord> trace;  // stages of the selected run
  std::vector<InitRun> runs;
  std::optional<double> training_error;  // semi-supervised runs only
  std::vector<std::string> notes;
  Vector offset;  // subtracted column means
  Vector scale;   // per-feature divisors (ones unless standardising)
};

struct ModeSplit {
  double depth = 0.0;
  std::optional<double> left_mode;
  std::optional<double> right_mode;
};

// Relative depth of b in the projected density together with the adjacent
// modes it separates; depth 0 when either side has no mode.
ModeSplit mode_split(const Vector& projections, double b, double h, std::size_t m);
double relative_depth(const Vector& v, double b, const Dataset& ds, double h, std::size_t m);

// Minimum-density hyperplane for clustering, annealing alpha with warm
// starts from each initial direction and selecting by relative depth.
MdhResult mdp2_cluster(const Dataset& ds, const MdhConfig& config = {});

struct SvmInit {
  Vector direction;
  bool fallback = false;  // labels had a single class; PC1 returned
};

// Linear hinge-loss classifier on the labelled rows (deterministic
// subgradient descent); returns the normalised weight direction.
SvmInit train_init_svm(const Dataset& ds, const LabeledSubset& labeled);

// Semi-supervised variant: picks the best of PC1/PC2/SVM by the projection
// index, sweeps alpha at the first gamma, then sweeps gamma at alpha_max.
MdhResult mdp2_ssc(const Dataset& ds, const LabeledSubset& labeled, const MdhConfig& config = {});

}  // namespace mdh
