#include "mdh/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "mdh/error.hpp"

namespace mdh {

std::string InitSpec::tag() const {
  switch (kind) {
    case InitKind::kPc1: return "pc1";
    case InitKind::kPc2: return "pc2";
    case InitKind::kSvm: return "svm";
    case InitKind::kRandom: return "random";
    case InitKind::kExplicit: return "explicit";
  }
  return "unknown";
}

std::vector<double> alpha_schedule_up_to(double alpha_max) {
  std::vector<double> out = {0.01};
  for (int k = 1; k <= 100; ++k) {
    const double a = k / 10.0;
    if (a >= alpha_max - 1e-12) break;
    if (a > out.back()) out.push_back(a);
  }
  if (alpha_max > out.back()) out.push_back(alpha_max);
  return out;
}

void MdhConfig::validate() const {
  if (h && !(*h > 0.0)) throw InputError("bandwidth must be positive");
  if (alpha_schedule.empty()) throw InputError("alpha schedule is empty");
  for (std::size_t k = 0; k < alpha_schedule.size(); ++k) {
    if (!(alpha_schedule[k] >= 0.0)) throw InputError("alpha values must be nonnegative");
    if (k > 0 && !(alpha_schedule[k] > alpha_schedule[k - 1]))
      throw InputError("alpha schedule must be strictly increasing");
  }
  if (std::abs(alpha_schedule.back() - alpha_max) > 1e-12)
    throw InputError("alpha schedule must end at alpha_max");
  for (std::size_t k = 0; k < gamma_schedule.size(); ++k) {
    if (!(gamma_schedule[k] >= 0.0)) throw InputError("gamma values must be nonnegative");
    if (k > 0 && gamma_schedule[k] < gamma_schedule[k - 1])
      throw InputError("gamma schedule must be nondecreasing");
  }
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (inner.grid_size < 32) throw InputError("grid size must be at least 32");
  if (depth_grid < 16) throw InputError("depth grid must be at least 16");
  if (inits.empty() && random_inits == 0) throw InputError("no initialisations configured");
  if (bfgs.max_iter < 1) throw InputError("BFGS iteration cap must be positive");
}

ModeSplit mode_split(const Vector& projections, double b, double h, std::size_t m) {
  const ProjectedKde kde(projections, h);
  const double lo = kde.min_point() - 3.0 * h;
  const double hi = kde.max_point() + 3.0 * h;
  const double tol = 4e-8 * (hi - lo);
  ModeSplit out;
  for (const auto& e : find_local_extrema(kde, lo, hi, m)) {
    if (e.kind != ExtremumKind::kMax) continue;
    if (e.location < b - tol) out.left_mode = e.location;  // ascending: keeps the nearest
    if (e.location > b + tol && !out.right_mode) out.right_mode = e.location;
  }
  if (!out.left_mode || !out.right_mode) return out;
  const double at_b = std::max(density_integral(kde, b), std::numeric_limits<double>::min());
  const double lower_mode =
      std::min(density_integral(kde, *out.left_mode), density_integral(kde, *out.right_mode));
  out.depth = std::max(0.0, (lower_mode - at_b) / at_b);
  return out;
}

double relative_depth(const Vector& v, double b, const Dataset& ds, double h, std::size_t m) {
  return mode_split(project(ds, v), b, h, m).depth;
}

namespace {

struct Stage {
  double alpha;
  double gamma;
};

struct Working {
  Dataset data;
  Vector offset;
  Vector scale;
};

Working preprocess(const Dataset& ds, bool standardize_features) {
  auto [centered, mean] = center(ds);
  if (!standardize_features) {
    const auto d = static_cast<Eigen::Index>(ds.d());
    return {std::move(centered), std::move(mean), Vector::Ones(d)};
  }
  auto [scaled, scale] = standardize(centered);
  return {std::move(scaled), std::move(mean), std::move(scale)};
}

Hyperplane to_original(const Hyperplane& working, const Vector& offset, const Vector& scale) {
  const Vector u = working.v.cwiseQuotient(scale);
  const double norm = u.norm();
  return {u / norm, (working.b + u.dot(offset)) / norm};
}

unsigned thread_budget(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MDH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs `count` independent jobs on up to `threads` workers; results land in
// per-index slots so the outcome does not depend on scheduling.
template <class Job>
void run_parallel(std::size_t count, unsigned threads, Job&& job) {
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          job(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StageRecord run_stage(const Dataset& ds, double h, const Stage& stage, const LabeledSubset* labeled,
                      const MdhConfig& cfg, Vector& theta) {
  const auto start = std::chrono::steady_clock::now();
  const PenaltyParams pp =
      PenaltyParams::for_bandwidth(h, stage.alpha, stage.gamma, cfg.eta, cfg.epsilon);

  const GradientOracle oracle = [&](const Vector& x, const Vector& dir, Vector& grad) {
    const auto eval = phi_value_and_gradient(ProjectionAngle{x}, ds, h, pp, labeled, cfg.inner,
                                             dir.size() > 0 ? &dir : nullptr);
    grad = eval.grad;
    return eval.value;
  };

  StageRecord rec;
  rec.alpha = stage.alpha;
  rec.gamma = stage.gamma;
  const auto result = bfgs_minimize(oracle, theta, cfg.bfgs);
  theta = result.x;

  const auto final_eval = phi_value_and_gradient(ProjectionAngle{theta}, ds, h, pp, labeled, cfg.inner);
  rec.phi_end = final_eval.value;
  rec.iterations = result.iterations;
  rec.evaluations = result.evaluations + 1;
  rec.grad_norm = final_eval.grad.norm();
  rec.status = std::string(to_string(result.status));
  rec.hyperplane = {final_eval.v, final_eval.inner.b_star};
  rec.is_density_minimizer = final_eval.inner.is_density_minimizer;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

InitRun run_init(const Dataset& ds, double h, const Vector& v0, std::string tag,
                 const std::vector<Stage>& stages, const LabeledSubset* labeled,
                 const MdhConfig& cfg) {
  InitRun run;
  run.tag = std::move(tag);
  Vector theta = unit_vector_to_angles(v0.normalized()).theta;
  for (const auto& stage : stages) {
    // phi at the warm start, measured with this stage's penalty.
    const PenaltyParams pp =
        PenaltyParams::for_bandwidth(h, stage.alpha, stage.gamma, cfg.eta, cfg.epsilon);
    const double phi_start =
        minimize_over_b(angles_to_unit_vector(ProjectionAngle{theta}), ds, h, pp, labeled, cfg.inner)
            .value;
    auto rec = run_stage(ds, h, stage, labeled, cfg, theta);
    rec.phi_start = phi_start;
    run.stages.push_back(std::move(rec));
  }

  // The last stage whose split is a local minimum of the projected density;
  // if there is none, the final stage with depth forced to zero.
  bool found = false;
  for (std::size_t k = run.stages.size(); k-- > 0;) {
    if (run.stages[k].is_density_minimizer) {
      run.selected_stage = k;
      found = true;
      break;
    }
  }
  if (!found) run.selected_stage = run.stages.size() - 1;
  const auto& sel = run.stages[run.selected_stage];
  run.hyperplane = sel.hyperplane;
  run.is_density_minimizer = found;
  const Vector proj = project(ds, run.hyperplane.v);
  run.density_integral = density_integral(ProjectedKde(proj, h), run.hyperplane.b);
  run.relative_depth = found ? mode_split(proj, run.hyperplane.b, h, cfg.depth_grid).depth : 0.0;
  return run;
}

Vector random_direction(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  do {
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = normal(rng);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

std::vector<std::pair<std::string, Vector>> initial_directions(const Dataset& ds,
                                                               const MdhConfig& cfg,
                                                               const PrincipalComponents& pcs,
                                                               const LabeledSubset* labeled,
                                                               std::vector<std::string>& notes) {
  std::vector<std::pair<std::string, Vector>> out;
  for (const auto& init : cfg.inits) {
    switch (init.kind) {
      case InitKind::kPc1:
        out.emplace_back("pc1", pcs.directions.col(0));
        break;
      case InitKind::kPc2:
        out.emplace_back("pc2", pcs.directions.col(1));
        break;
      case InitKind::kSvm: {
        if (!labeled) throw InputError("svm initialisation needs labels");
        const auto svm = train_init_svm(ds, *labeled);
        if (svm.fallback) notes.push_back("svm_init_fallback_pc1: labelled rows hold a single class");
        out.emplace_back("svm", svm.direction);
        break;
      }
      case InitKind::kRandom:
        break;  // drawn below with the configured seed
      case InitKind::kExplicit:
        if (static_cast<std::size_t>(init.direction.size()) != ds.d() || init.direction.norm() == 0.0)
          throw InputError("explicit initial direction has the wrong dimension or is zero");
        out.emplace_back("explicit", init.direction.normalized());
        break;
    }
  }
  std::mt19937_64 rng(cfg.seed);
  std::size_t random_count = cfg.random_inits;
  for (const auto& init : cfg.inits)
    if (init.kind == InitKind::kRandom) ++random_count;
  for (std::size_t k = 0; k < random_count; ++k)
    out.emplace_back("random" + std::to_string(k), random_direction(rng, ds.d()));
  return out;
}

void check_shape(const Dataset& ds) {
  if (ds.n() < 4) throw DegenerateDataError("need at least 4 rows");
}

MdhResult assemble(const Working& work, double h, std::vector<InitRun> runs, std::size_t winner,
                   std::vector<std::string> notes) {
  MdhResult res;
  const auto& best = runs[winner];
  res.working_hyperplane = best.hyperplane;
  res.hyperplane = to_original(best.hyperplane, work.offset, work.scale);
  res.h = h;
  res.density_integral = best.density_integral;
  res.relative_depth = best.relative_depth;
  res.is_density_minimizer = best.is_density_minimizer;
  res.partition = partition(work.data, best.hyperplane);
  res.init_tag = best.tag;
  res.init_index = winner;
  res.trace = best.stages;
  res.runs = std::move(runs);
  res.notes = std::move(notes);
  res.offset = work.offset;
  res.scale = work.scale;
  return res;
}

}  // namespace

MdhResult mdp2_cluster(const Dataset& ds, const MdhConfig& cfg) {
  cfg.validate();
  check_shape(ds);
  const Working work = preprocess(ds, cfg.standardize);
  const double h = cfg.h ? *cfg.h : default_bandwidth(work.data);
  const auto pcs = principal_components(work.data, 2);
  if (!(pcs.variances(0) > 0.0)) throw DegenerateDataError("zero variance");

  std::vector<std::string> notes;
  const auto inits = initial_directions(work.data, cfg, pcs, nullptr, notes);
  std::vector<Stage> stages;
  for (double a : cfg.alpha_schedule) stages.push_back({a, 0.0});

  std::vector<InitRun> runs(inits.size());
  run_parallel(inits.size(), thread_budget(cfg.threads), [&](std::size_t k) {
    runs[k] = run_init(work.data, h, inits[k].second, inits[k].first, stages, nullptr, cfg);
  });

  // Largest relative depth; ties go to the lower density, then init order.
  std::size_t winner = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const auto& a = runs[k];
    const auto& b = runs[winner];
    if (a.relative_depth > b.relative_depth ||
        (a.relative_depth == b.relative_depth && a.density_integral < b.density_integral))
      winner = k;
  }
  if (runs[winner].relative_depth == 0.0)
    notes.push_back("no initialisation produced a hyperplane separating two modes");
  return assemble(work, h, std::move(runs), winner, std::move(notes));
}

SvmInit train_init_svm(const Dataset& ds, const LabeledSubset& labeled) {
  validate_labels(labeled, ds.n());
  if (!labeled.has_both_classes()) {
    const auto pcs = principal_components(ds, 1);
    return {pcs.directions.col(0), true};
  }
  const std::size_t ell = labeled.size();
  const double lambda = 1.0 / static_cast<double>(ell);
  constexpr int kIterations = 10000;

  // Train on the labelled rows centred and scaled to unit RMS norm. The
  // bias is unregularised, so neither step changes the optimal direction,
  // but the fixed step schedule converges far better at unit scale and the
  // result no longer depends on the units of the features.
  Matrix rows(static_cast<Eigen::Index>(ell), static_cast<Eigen::Index>(ds.d()));
  for (std::size_t k = 0; k < ell; ++k)
    rows.row(static_cast<Eigen::Index>(k)) =
        ds.rows().row(static_cast<Eigen::Index>(labeled.indices[k]));
  rows.rowwise() -= rows.colwise().mean();
  const double rms = std::sqrt(rows.squaredNorm() / static_cast<double>(ell));
  if (rms > 0.0) rows /= rms;

  Vector w = Vector::Zero(rows.cols());
  double bias = 0.0;
  for (int t = 1; t <= kIterations; ++t) {
    const double step = 1.0 / (lambda * t);
    Vector sub_w = lambda * w;
    double sub_b = 0.0;
    for (std::size_t k = 0; k < ell; ++k) {
      const auto row = rows.row(static_cast<Eigen::Index>(k));
      const double y = labeled.labels[k];
      if (y * (row.dot(w) + bias) < 1.0) {
        sub_w -= (y / static_cast<double>(ell)) * row.transpose();
        sub_b -= y / static_cast<double>(ell);
      }
    }
    w -= step * sub_w;
    bias -= step * sub_b;
  }
  if (w.norm() == 0.0) {
    const auto pcs = principal_components(ds, 1);
    return {pcs.directions.col(0), true};
  }
  return {w.normalized(), false};
}

MdhResult mdp2_ssc(const Dataset& ds, const LabeledSubset& labeled, const MdhConfig& cfg) {
  cfg.validate();
  check_shape(ds);
  if (labeled.empty()) throw LabelConfigError("semi-supervised run needs at least one labelled row");
  validate_labels(labeled, ds.n());
  if (cfg.gamma_schedule.empty()) throw InputError("gamma schedule is empty");

  const bool unlabelled_objective =
      std::all_of(cfg.gamma_schedule.begin(), cfg.gamma_schedule.end(),
                  [](double g) { return g == 0.0; });
  if (unlabelled_objective) {
    auto res = mdp2_cluster(ds, cfg);
    res.notes.push_back("gamma schedule is all zero: ran the clustering objective");
    return res;
  }

  const Working work = preprocess(ds, cfg.standardize);
  const double h = cfg.h ? *cfg.h : default_bandwidth(work.data);
  const auto pcs = principal_components(work.data, 2);

  std::vector<std::string> notes;
  MdhConfig candidates_cfg = cfg;
  candidates_cfg.inits = {{InitKind::kPc1, {}}, {InitKind::kPc2, {}}, {InitKind::kSvm, {}}};
  candidates_cfg.random_inits = 0;
  const auto candidates = initial_directions(work.data, candidates_cfg, pcs, &labeled, notes);

  const double gamma0 = cfg.gamma_schedule.front();
  const PenaltyParams pp0 =
      PenaltyParams::for_bandwidth(h, cfg.alpha_schedule.front(), gamma0, cfg.eta, cfg.epsilon);
  std::size_t chosen = 0;
  double chosen_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double value =
        minimize_over_b(candidates[k].second, work.data, h, pp0, &labeled, cfg.inner).value;
    if (value < chosen_value) {
      chosen_value = value;
      chosen = k;
    }
  }

  std::vector<Stage> stages;
  for (double a : cfg.alpha_schedule) stages.push_back({a, gamma0});
  for (std::size_t k = 1; k < cfg.gamma_schedule.size(); ++k)
    stages.push_back({cfg.alpha_max, cfg.gamma_schedule[k]});

  std::vector<InitRun> runs;
  runs.push_back(run_init(work.data, h, candidates[chosen].second, candidates[chosen].first, stages,
                          &labeled, cfg));
  auto res = assemble(work, h, std::move(runs), 0, std::move(notes));

  std::size_t wrong = 0;
  for (std::size_t k = 0; k < labeled.size(); ++k)
    if (res.partition[labeled.indices[k]] != labeled.labels[k]) ++wrong;
  res.training_error = static_cast<double>(wrong) / static_cast<double>(labeled.size());
  return res;
}

}  // namespace mdh
