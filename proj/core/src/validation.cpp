#include "mdh/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mdh/kde1d.hpp"
#include "mdh/objective.hpp"
#include "mdh/optimizer.hpp"
#include "mdh/oracles.hpp"

namespace mdh::validation {

namespace {

struct PlanarInstance {
  Dataset data;
  double h;
};

// A small planar sample drawn around one or two random centres.
PlanarInstance random_planar(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = size(rng);
  const double spread = 0.5 + 1.5 * unit(rng);
  Matrix rows(n, 2);
  const double cx = 4.0 * unit(rng) - 2.0, cy = 4.0 * unit(rng) - 2.0;
  for (int i = 0; i < n; ++i) {
    const double shift = (i % 2 == 0) ? 0.0 : 2.0;
    rows(i, 0) = cx + shift + spread * normal(rng);
    rows(i, 1) = cy + spread * normal(rng);
  }
  return {Dataset(std::move(rows)), 0.2 + 0.8 * unit(rng)};
}

Hyperplane random_line(std::mt19937_64& rng, const PlanarInstance& inst) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double angle = 2.0 * std::numbers::pi * unit(rng);
  Vector v(2);
  v << std::cos(angle), std::sin(angle);
  const Vector p = project(inst.data, v);
  const double lo = p.minCoeff() - inst.h, hi = p.maxCoeff() + inst.h;
  return {v, lo + (hi - lo) * unit(rng)};
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  bool same = true, flipped = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i] == b[i];
    flipped = flipped && a[i] == -b[i];
  }
  return same || flipped;
}

}  // namespace

SuiteReport run_projection_exactness(std::uint64_t seed, std::size_t datasets, std::size_t planes) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < datasets; ++k) {
    const auto inst = random_planar(rng);
    for (std::size_t j = 0; j < planes; ++j) {
      const auto hp = random_line(rng, inst);
      const double fast = density_integral(ProjectedKde(project(inst.data, hp.v), inst.h), hp.b);
      const double slow = oracles::hyperplane_quadrature(inst.data, inst.h, hp);
      worst = std::max(worst, std::abs(fast - slow) / std::max(std::abs(slow), 1e-300));
    }
  }
  SuiteReport r;
  r.suite = "eq4";
  r.checks.push_back({"projected_kde_matches_quadrature", worst <= 1e-6,
                      {{"max_relative_gap", worst},
                       {"instances", static_cast<double>(datasets * planes)}}});
  r.passed = r.checks.back().passed;
  return r;
}

SuiteReport run_level_set_bound(std::uint64_t seed, std::size_t datasets, std::size_t planes,
                       std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t k = 0; k < datasets; ++k) {
    const auto inst = random_planar(rng);
    for (std::size_t j = 0; j < planes; ++j) {
      const auto hp = random_line(rng, inst);
      const double integral = density_integral(ProjectedKde(project(inst.data, hp.v), inst.h), hp.b);
      const double bound = integral / std::sqrt(2.0 * std::numbers::pi * inst.h * inst.h);
      Vector along(2);
      along << -hp.v(1), hp.v(0);
      const Vector t = project(inst.data, along);
      const double lo = t.minCoeff() - 3.0 * inst.h, hi = t.maxCoeff() + 3.0 * inst.h;
      for (std::size_t s = 0; s < samples; ++s) {
        const Vector x = hp.b * hp.v + (lo + (hi - lo) * unit(rng)) * along;
        const double value = oracles::full_kde(inst.data, inst.h, x);
        min_slack = std::min(min_slack, bound - value);
        if (value > bound + 1e-12) ++violations;
      }
    }
  }
  SuiteReport r;
  r.suite = "lemma1";
  r.checks.push_back({"full_kde_below_level_bound", violations == 0,
                      {{"violations", static_cast<double>(violations)},
                       {"min_slack", min_slack},
                       {"samples", static_cast<double>(datasets * planes * samples)}}});
  r.passed = r.checks.back().passed;
  return r;
}

SuiteReport run_penalty_calibration(std::uint64_t seed, std::size_t pairs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr std::size_t kDenseGrid = 100000;
  const std::size_t dims[] = {2, 3, 5};

  double max_excursion = 0.0;     // distance of any minimiser outside [lo, hi]
  double max_displacement = 0.0;  // distance from the constrained minimiser
  std::size_t excursion_fail = 0, displacement_fail = 0;
  double eta = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t d = dims[k % 3];
    const auto n = static_cast<Eigen::Index>(30 + static_cast<int>(90 * unit(rng)));
    Matrix rows(n, static_cast<Eigen::Index>(d));
    const int centres = 1 + static_cast<int>(3 * unit(rng));
    std::vector<Vector> mu(static_cast<std::size_t>(centres), Vector(static_cast<Eigen::Index>(d)));
    for (auto& c : mu)
      for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = 4.0 * normal(rng);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < rows.cols(); ++j)
        rows(i, j) = mu[static_cast<std::size_t>(i % centres)](j) + normal(rng);
    const Dataset ds(std::move(rows));
    const double h = default_bandwidth(ds);

    Vector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = normal(rng);
    v.normalize();
    const double alpha = 0.05 + 1.15 * unit(rng);
    const auto pp = PenaltyParams::for_bandwidth(h, alpha, 0.0);
    eta = pp.eta;

    const Vector p = project(ds, v);
    const PenalizedProfile profile(std::vector<double>(p.data(), p.data() + p.size()), h, pp);
    const auto sol = minimize_over_b(profile);
    const auto& iv = profile.interval();

    const auto grid = linspace(iv.lo, iv.hi, kDenseGrid);
    const auto values = grid_evaluate(profile.kde(), iv.lo, iv.hi, kDenseGrid);
    const double constrained =
        grid[static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin())];

    double nearest = std::numeric_limits<double>::infinity();
    for (double b : sol.minimizer_set) {
      const double out = std::max({0.0, iv.lo - b, b - iv.hi});
      max_excursion = std::max(max_excursion, out);
      if (out > pp.eta) ++excursion_fail;
      nearest = std::min(nearest, std::abs(b - constrained));
    }
    max_displacement = std::max(max_displacement, nearest);
    if (nearest > pp.eta) ++displacement_fail;
  }
  SuiteReport r;
  r.suite = "prop1";
  r.checks.push_back({"minimisers_within_eta_of_interval", excursion_fail == 0,
                      {{"max_excursion", max_excursion}, {"eta", eta},
                       {"failures", static_cast<double>(excursion_fail)}}});
  r.checks.push_back({"constrained_minimiser_within_eta", displacement_fail == 0,
                      {{"max_displacement", max_displacement}, {"eta", eta},
                       {"failures", static_cast<double>(displacement_fail)}}});
  r.passed = excursion_fail == 0 && displacement_fail == 0;
  return r;
}

Dataset planted_slab_data(std::uint64_t seed, std::size_t n, double half_gap) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double angle = 0.35, offset = 0.3;
  Vector v(2), u(2);
  v << std::cos(angle), std::sin(angle);
  u << -v(1), v(0);
  Matrix rows(static_cast<Eigen::Index>(n), 2);
  std::size_t kept = 0;
  while (kept < n) {
    const double side = kept % 2 == 0 ? 1.0 : -1.0;
    const double along = offset + side * 2.5 + normal(rng);
    if (std::abs(along - offset) < half_gap) continue;
    rows.row(static_cast<Eigen::Index>(kept++)) = (along * v + 1.5 * normal(rng) * u).transpose();
  }
  return Dataset(std::move(rows));
}

SuiteReport run_convergence(std::uint64_t seed, std::size_t halvings) {
  constexpr double kAlpha = 0.9;
  const Dataset ds = planted_slab_data(seed, 240, 0.7);
  const auto mmh = oracles::brute_force_max_margin(ds, kAlpha);
  const auto mmh_partition = partition(ds, mmh.hyperplane);
  const double h0 = default_bandwidth(center(ds).first);

  SuiteReport r;
  r.suite = "convergence";
  r.table.columns = {"h", "distance", "partition_equal", "mdh_margin", "relative_depth"};

  MdhConfig cfg;
  cfg.alpha_max = kAlpha;
  cfg.alpha_schedule = alpha_schedule_up_to(kAlpha);
  cfg.threads = 1;
  std::vector<bool> equal;
  double last_distance = 0.0;
  for (std::size_t k = 0; k <= halvings; ++k) {
    cfg.h = h0 / std::ldexp(1.0, static_cast<int>(k));
    const auto res = mdp2_cluster(ds, cfg);
    const bool same = same_partition(res.partition, mmh_partition);
    last_distance = hyperplane_distance(res.hyperplane, mmh.hyperplane);
    equal.push_back(same);
    r.table.rows.push_back({*cfg.h, last_distance, same ? 1.0 : 0.0,
                            margin(ds, res.hyperplane), res.relative_depth});
    // Warm start the next bandwidth from this solution at the final alpha.
    cfg.inits = {{InitKind::kExplicit, res.working_hyperplane.v}};
    cfg.alpha_schedule = {kAlpha};
  }

  const auto first = std::find(equal.begin(), equal.end(), true);
  const bool stays = first != equal.end() && std::all_of(first, equal.end(), [](bool e) { return e; });
  r.checks.push_back({"partition_matches_after_first_success", stays,
                      {{"first_success_index",
                        first == equal.end() ? -1.0 : static_cast<double>(first - equal.begin())},
                       {"max_margin", mmh.margin}}});
  r.checks.push_back({"final_distance_below_0.05", last_distance < 0.05,
                      {{"distance", last_distance}, {"h", h0 / std::ldexp(1.0, static_cast<int>(halvings))}}});
  r.passed = r.checks[0].passed && r.checks[1].passed;
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"eq4", "lemma1", "prop1", "convergence"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "eq4") return run_projection_exactness(seed);
  if (name == "lemma1") return run_level_set_bound(seed);
  if (name == "prop1") return run_penalty_calibration(seed);
  if (name == "convergence") return run_convergence(seed);
  throw std::invalid_argument("unknown validation suite '" + name + "'");
}

}  // namespace mdh::validation
