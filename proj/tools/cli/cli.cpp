#include "cli/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli/json_writer.hpp"
#include "mdh/dataset.hpp"
#include "mdh/error.hpp"
#include "mdh/kde1d.hpp"
#include "mdh/metrics.hpp"
#include "mdh/optimizer.hpp"
#include "mdh/validation.hpp"
#include "mdh/version.hpp"

namespace mdh::cli {

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::size_t kPlotPoints = 512;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flags shared by `cluster` and `ssc`; echoed into every report so a run can
// be replayed from it.
struct RunOptions {
  std::string input;
  std::optional<bool> header;  // auto-detected when absent
  std::optional<std::string> label_col;
  std::optional<std::string> truth_col;
  std::optional<std::string> positive_label;
  std::optional<double> h;
  double alpha_max = 0.9;
  std::vector<double> gamma_schedule = {0.1, 1.0, 10.0};
  std::uint64_t seed = 0;
  std::size_t random_inits = 0;
  bool standardize = false;
  std::size_t grid_size = 256;
  std::size_t depth_grid = 1024;
  int max_iter = 100;
};

template <class T>
Json optional_json(const std::optional<T>& x) {
  return x ? Json(*x) : Json(nullptr);
}

template <class T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

MdhConfig make_config(const RunOptions& o) {
  MdhConfig cfg;
  cfg.h = o.h;
  cfg.alpha_max = o.alpha_max;
  if (!(o.alpha_max > 0.0)) throw InputError("alpha-max must be positive");
  cfg.alpha_schedule = alpha_schedule_up_to(o.alpha_max);
  cfg.gamma_schedule = o.gamma_schedule;
  cfg.seed = o.seed;
  cfg.random_inits = o.random_inits;
  cfg.standardize = o.standardize;
  cfg.inner.grid_size = o.grid_size;
  cfg.depth_grid = o.depth_grid;
  cfg.bfgs.max_iter = o.max_iter;
  cfg.validate();
  return cfg;
}

Json config_json(const std::string& command, const RunOptions& o, const MdhConfig& cfg) {
  Json inits = Json::array();
  for (const auto& init : cfg.inits) inits.push_back(init.tag());
  return Json{
      {"command", command},
      {"input", o.input},
      {"header", optional_json(o.header)},
      {"label_col", optional_json(o.label_col)},
      {"truth_col", optional_json(o.truth_col)},
      {"positive_label", optional_json(o.positive_label)},
      {"h", optional_json(o.h)},
      {"alpha_max", o.alpha_max},
      {"alpha_schedule", cfg.alpha_schedule},
      {"gamma_schedule", o.gamma_schedule},
      {"eta", cfg.eta},
      {"epsilon", cfg.epsilon},
      {"seed", o.seed},
      {"random_inits", o.random_inits},
      {"inits", inits},
      {"standardize", o.standardize},
      {"grid_size", o.grid_size},
      {"depth_grid", o.depth_grid},
      {"max_iter", o.max_iter},
      {"grad_tol", cfg.bfgs.grad_tol},
  };
}

RunOptions options_from_report(const std::string& path, const std::string& command) {
  std::ifstream file(path);
  if (!file) throw InputError("cannot open report file '" + path + "'");
  Json report;
  try {
    report = Json::parse(file);
  } catch (const std::exception& e) {
    throw InputError("report file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!report.contains("config")) throw InputError("report file '" + path + "' has no config");
  const Json& c = report.at("config");
  try {
    if (c.at("command").get<std::string>() != command)
      throw InputError("report was produced by '" + c.at("command").get<std::string>() +
                       "', not '" + command + "'");
    RunOptions o;
    o.input = c.at("input").get<std::string>();
    o.header = optional_from<bool>(c, "header");
    o.label_col = optional_from<std::string>(c, "label_col");
    o.truth_col = optional_from<std::string>(c, "truth_col");
    o.positive_label = optional_from<std::string>(c, "positive_label");
    o.h = optional_from<double>(c, "h");
    o.alpha_max = c.at("alpha_max").get<double>();
    o.gamma_schedule = c.at("gamma_schedule").get<std::vector<double>>();
    o.seed = c.at("seed").get<std::uint64_t>();
    o.random_inits = c.at("random_inits").get<std::size_t>();
    o.standardize = c.at("standardize").get<bool>();
    o.grid_size = c.at("grid_size").get<std::size_t>();
    o.depth_grid = c.at("depth_grid").get<std::size_t>();
    o.max_iter = c.at("max_iter").get<int>();
    return o;
  } catch (const Json::exception& e) {
    throw InputError("report file '" + path + "' has a malformed config: " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

bool is_number(const std::string& field) {
  const auto first = field.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return false;
  const auto last = field.find_last_not_of(" \t\r\"");
  const std::string s = field.substr(first, last - first + 1);
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// A header is present when some column is non-numeric on the first line but
// numeric on the second.
bool detect_header(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> lines;
  while (lines.size() < 2 && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(split_line(line));
  }
  if (lines.size() < 2) return false;
  const std::size_t cols = std::min(lines[0].size(), lines[1].size());
  for (std::size_t c = 0; c < cols; ++c)
    if (!is_number(lines[0][c]) && is_number(lines[1][c])) return true;
  return false;
}

CsvData load_input(const RunOptions& o, bool map_to_sign) {
  const std::string text = read_file(o.input);
  CsvOptions opts;
  opts.has_header = o.header.value_or(detect_header(text));
  opts.label_column = o.label_col;
  opts.truth_column = o.truth_col;
  opts.positive_label = o.positive_label;
  opts.map_to_sign = map_to_sign;
  return parse_csv(text, opts);
}

Json vec_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json hyperplane_json(const Hyperplane& hp) { return Json{{"v", vec_json(hp.v)}, {"b", hp.b}}; }

Json result_json(const MdhResult& r) {
  Json trace = Json::array();
  for (const auto& s : r.trace) {
    trace.push_back(Json{
        {"alpha", s.alpha},
        {"gamma", s.gamma},
        {"phi_start", s.phi_start},
        {"phi_end", s.phi_end},
        {"iterations", s.iterations},
        {"evaluations", s.evaluations},
        {"grad_norm", s.grad_norm},
        {"status", s.status},
        {"working_hyperplane", hyperplane_json(s.hyperplane)},
        {"is_density_minimizer", s.is_density_minimizer},
    });
  }
  Json runs = Json::array();
  for (const auto& run : r.runs) {
    runs.push_back(Json{
        {"init", run.tag},
        {"selected_stage", run.selected_stage},
        {"working_hyperplane", hyperplane_json(run.hyperplane)},
        {"density_integral", run.density_integral},
        {"relative_depth", run.relative_depth},
        {"is_density_minimizer", run.is_density_minimizer},
    });
  }
  std::size_t positive = 0;
  for (int s : r.partition)
    if (s > 0) ++positive;
  return Json{
      {"hyperplane", hyperplane_json(r.hyperplane)},
      {"working_hyperplane", hyperplane_json(r.working_hyperplane)},
      {"h", r.h},
      {"density_integral", r.density_integral},
      {"relative_depth", r.relative_depth},
      {"is_density_minimizer", r.is_density_minimizer},
      {"init", r.init_tag},
      {"init_index", r.init_index},
      {"offset", vec_json(r.offset)},
      {"scale", vec_json(r.scale)},
      {"partition_sizes", Json{{"positive", positive}, {"negative", r.partition.size() - positive}}},
      {"partition", r.partition},
      {"trace", trace},
      {"runs", runs},
      {"notes", r.notes},
  };
}

Json timing_json(const MdhResult& r, double total) {
  Json stages = Json::array();
  for (const auto& run : r.runs) {
    Json per = Json::array();
    for (const auto& s : run.stages) per.push_back(s.seconds);
    stages.push_back(Json{{"init", run.tag}, {"stage_seconds", per}});
  }
  return Json{{"total_seconds", total}, {"runs", stages}};
}

// Cluster ids for rows with a non-empty truth cell, in order of first use.
struct Truth {
  std::vector<int> ids;
  std::vector<std::size_t> rows;
  std::vector<std::string> names;
};

Truth index_truth(const std::vector<std::string>& raw) {
  Truth t;
  std::map<std::string, int> ids;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].empty()) continue;
    auto [it, inserted] = ids.emplace(raw[i], static_cast<int>(ids.size()));
    if (inserted) t.names.push_back(raw[i]);
    t.ids.push_back(it->second);
    t.rows.push_back(i);
  }
  return t;
}

Json metrics_json(const Truth& truth, const std::vector<int>& partition) {
  std::vector<int> part;
  part.reserve(truth.rows.size());
  for (std::size_t i : truth.rows) part.push_back(partition[i]);
  const auto m = success_ratio(truth.ids, part);
  Json agg = Json::object();
  for (const auto& [id, side] : m.aggregate_map) agg[truth.names[static_cast<std::size_t>(id)]] = side;
  return Json{
      {"evaluated_rows", truth.rows.size()},
      {"success_ratio", m.success_ratio},
      {"v_measure", m.v_measure},
      {"error_count", m.error_count},
      {"success_count", m.success_count},
      {"aggregate_map", agg},
  };
}

void write_plot_data(const std::string& path, const Dataset& ds, const MdhResult& r,
                     std::size_t depth_grid) {
  // Original coordinates: projections onto the reported normal, with the
  // bandwidth rescaled by the same factor as the offset.
  const Vector u = r.working_hyperplane.v.cwiseQuotient(r.scale);
  const double h = r.h / u.norm();
  const Vector p = project(ds, r.hyperplane.v);
  const ProjectedKde kde(p, h);
  const auto split = mode_split(p, r.hyperplane.b, h, depth_grid);

  std::ofstream out(path);
  if (!out) throw InputError("cannot write plot data to '" + path + "'");
  char buf[96];
  auto row = [&](double b, const char* flag) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", b, density_integral(kde, b), flag);
    out << buf;
  };
  out << "b,density,flag\n";
  for (double b : linspace(kde.min_point(), kde.max_point(), kPlotPoints)) row(b, "curve");
  row(r.hyperplane.b, "optimum");
  if (split.left_mode) row(*split.left_mode, "mode_left");
  if (split.right_mode) row(*split.right_mode, "mode_right");
}

void emit(const Json& report, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    write_json(out, report);
    return;
  }
  std::ofstream file(output);
  if (!file) throw InputError("cannot write report to '" + output + "'");
  write_json(file, report);
}

Json report_header(const std::string& command) {
  return Json{{"schema_version", kSchemaVersion}, {"artifact_version", std::string(kVersion)},
              {"command", command}};
}

int cmd_cluster(RunOptions o, const std::string& from_report, const std::string& output,
                const std::string& plot_data, std::ostream& out) {
  const auto start = Clock::now();
  if (!from_report.empty()) o = options_from_report(from_report, "cluster");
  o.truth_col.reset();
  o.positive_label.reset();
  const MdhConfig cfg = make_config(o);
  const CsvData csv = load_input(o, false);
  const MdhResult res = mdp2_cluster(csv.dataset, cfg);

  Json report = report_header("cluster");
  report["config"] = config_json("cluster", o, cfg);
  report["data"] = Json{{"n", csv.dataset.n()}, {"d", csv.dataset.d()},
                        {"feature_names", csv.feature_names}};
  report["result"] = result_json(res);
  if (!csv.raw_labels.empty()) {
    const Truth truth = index_truth(csv.raw_labels);
    report["metrics"] = truth.rows.empty() ? Json(nullptr) : metrics_json(truth, res.partition);
  }
  if (!plot_data.empty()) write_plot_data(plot_data, csv.dataset, res, cfg.depth_grid);
  report["timing"] = timing_json(res, seconds_since(start));
  emit(report, output, out);
  return kOk;
}

int cmd_ssc(RunOptions o, const std::string& from_report, const std::string& output,
            const std::string& plot_data, std::ostream& out) {
  const auto start = Clock::now();
  if (!from_report.empty()) o = options_from_report(from_report, "ssc");
  if (!o.label_col) throw InputError("ssc needs --label-col");
  const MdhConfig cfg = make_config(o);
  const CsvData csv = load_input(o, true);
  const LabeledSubset labeled = csv.labeled.value_or(LabeledSubset{});
  const MdhResult res = mdp2_ssc(csv.dataset, labeled, cfg);

  Json report = report_header("ssc");
  report["config"] = config_json("ssc", o, cfg);
  report["data"] = Json{{"n", csv.dataset.n()}, {"d", csv.dataset.d()},
                        {"feature_names", csv.feature_names},
                        {"labelled_rows", labeled.size()},
                        {"positive_symbol", optional_json(csv.positive_symbol)},
                        {"negative_symbol", optional_json(csv.negative_symbol)}};
  report["result"] = result_json(res);

  Json ssc{{"training_error", optional_json(res.training_error)},
           {"unlabelled_error", nullptr},
           {"unlabelled_rows", nullptr}};
  if (!csv.truth_labels.empty()) {
    const auto truth = map_sign_labels(csv.truth_labels, csv.positive_symbol);
    std::vector<int> full(csv.dataset.n(), 0);
    std::vector<bool> skip(csv.dataset.n(), true);
    for (std::size_t k = 0; k < truth.size(); ++k) {
      full[truth.indices[k]] = truth.labels[k];
      skip[truth.indices[k]] = false;
    }
    for (std::size_t i : labeled.indices) skip[i] = true;
    std::vector<std::size_t> exclude;
    for (std::size_t i = 0; i < skip.size(); ++i)
      if (skip[i]) exclude.push_back(i);
    const std::size_t evaluated = csv.dataset.n() - exclude.size();
    ssc["unlabelled_rows"] = evaluated;
    if (evaluated == 0) {
      ssc["note"] = "no unlabelled rows with ground truth; unlabelled error not computed";
    } else {
      ssc["unlabelled_error"] = classification_error(res.partition, full, exclude, false);
    }
    report["metrics"] = metrics_json(index_truth(csv.truth_labels), res.partition);
  }
  report["ssc"] = ssc;
  if (!plot_data.empty()) write_plot_data(plot_data, csv.dataset, res, cfg.depth_grid);
  report["timing"] = timing_json(res, seconds_since(start));
  emit(report, output, out);
  return kOk;
}

int cmd_validate(const std::string& suite, std::uint64_t seed, const std::string& output,
                 std::ostream& out, std::ostream& err) {
  std::vector<std::string> suites;
  if (suite == "all") suites = validation::suite_names();
  else suites = {suite};

  Json report = report_header("validate");
  report["config"] = Json{{"suite", suite}, {"seed", seed}};
  Json results = Json::array();
  Json timing = Json::object();
  bool all_passed = true;
  for (const auto& name : suites) {
    const auto start = Clock::now();
    const auto r = validation::run_suite(name, seed);
    timing[name + "_seconds"] = seconds_since(start);
    all_passed = all_passed && r.passed;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      Json measured = Json::object();
      for (const auto& [key, value] : c.measured) measured[key] = value;
      checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"measured", measured}});
      err << (c.passed ? "PASS " : "FAIL ") << r.suite << "/" << c.name << "\n";
    }
    Json entry{{"suite", r.suite}, {"passed", r.passed}, {"checks", checks}};
    if (!r.table.columns.empty())
      entry["table"] = Json{{"columns", r.table.columns}, {"rows", r.table.rows}};
    results.push_back(entry);
  }
  report["suites"] = results;
  report["passed"] = all_passed;
  report["timing"] = timing;
  emit(report, output, out);
  return all_passed ? kOk : kValidationFailed;
}

void add_run_flags(CLI::App* cmd, RunOptions& o, std::optional<double>& h_flag, bool& header,
                   bool& no_header) {
  cmd->add_option("--input", o.input, "CSV file, one observation per row");
  cmd->add_flag("--header", header, "first line holds column names");
  cmd->add_flag("--no-header", no_header, "first line is data");
  cmd->add_option("--h", h_flag, "bandwidth (default: 0.9 sd_pc1 n^-1/5)");
  cmd->add_option("--alpha-max", o.alpha_max, "final feasible-interval half-width in sd units")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for random initialisations")->capture_default_str();
  cmd->add_option("--random-inits", o.random_inits, "extra random initial directions")
      ->capture_default_str();
  cmd->add_flag("--standardize", o.standardize, "scale features to unit variance");
  cmd->add_option("--grid-size", o.grid_size, "grid points for the offset search")
      ->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "BFGS iterations per stage")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum density hyperplanes for clustering and semi-supervised classification",
               "mdh"};
  app.require_subcommand(1);
  // "--h" is the bandwidth, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", std::string(kVersion));

  RunOptions cluster_opts, ssc_opts;
  std::optional<double> cluster_h, ssc_h;
  bool cluster_header = false, cluster_no_header = false;
  bool ssc_header = false, ssc_no_header = false;
  std::string output, plot_data, from_report;

  auto* cluster = app.add_subcommand("cluster", "binary clustering split");
  add_run_flags(cluster, cluster_opts, cluster_h, cluster_header, cluster_no_header);
  cluster->add_option("--label-col", cluster_opts.label_col,
                      "ground-truth column (name or 0-based index), used for evaluation only");
  cluster->add_option("--output", output, "write the report here instead of stdout");
  cluster->add_option("--plot-data", plot_data, "write the projected density curve as CSV");
  cluster->add_option("--from-report", from_report, "replay the configuration of a report");

  auto* ssc = app.add_subcommand("ssc", "semi-supervised binary classification");
  add_run_flags(ssc, ssc_opts, ssc_h, ssc_header, ssc_no_header);
  ssc->add_option("--label-col", ssc_opts.label_col,
                  "partial labels; empty cells are unlabelled");
  ssc->add_option("--positive-label", ssc_opts.positive_label, "label symbol mapped to +1");
  ssc->add_option("--truth-col", ssc_opts.truth_col,
                  "full ground truth for evaluating the unlabelled rows");
  ssc->add_option("--gamma-schedule", ssc_opts.gamma_schedule, "label penalty weights")
      ->delimiter(',')
      ->capture_default_str();
  ssc->add_option("--output", output, "write the report here instead of stdout");
  ssc->add_option("--plot-data", plot_data, "write the projected density curve as CSV");
  ssc->add_option("--from-report", from_report, "replay the configuration of a report");

  std::string suite = "all";
  std::uint64_t validate_seed = 0;
  auto* validate = app.add_subcommand("validate", "oracle-backed validation experiments");
  validate->add_option("--suite", suite, "eq4, lemma1, prop1, convergence or all")
      ->check(CLI::IsMember({"eq4", "lemma1", "prop1", "convergence", "all"}))
      ->capture_default_str();
  validate->add_option("--seed", validate_seed, "seed for generated instances")
      ->capture_default_str();
  validate->add_option("--output", output, "write the report here instead of stdout");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  auto finish = [](RunOptions& o, const std::optional<double>& h, bool header, bool no_header,
                   const std::string& from) {
    if (header && no_header) throw InputError("--header and --no-header are exclusive");
    if (header) o.header = true;
    if (no_header) o.header = false;
    o.h = h;
    if (h && !(*h > 0.0)) throw InputError("bandwidth must be positive");
    if (from.empty() && o.input.empty()) throw InputError("--input is required");
  };

  try {
    if (cluster->parsed()) {
      finish(cluster_opts, cluster_h, cluster_header, cluster_no_header, from_report);
      return cmd_cluster(cluster_opts, from_report, output, plot_data, out);
    }
    if (ssc->parsed()) {
      finish(ssc_opts, ssc_h, ssc_header, ssc_no_header, from_report);
      return cmd_ssc(ssc_opts, from_report, output, plot_data, out);
    }
    return cmd_validate(suite, validate_seed, output, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DegenerateDataError& e) {
    err << "error: degenerate data: " << e.what() << "\n";
    return kDegenerateData;
  } catch (const LabelConfigError& e) {
    err << "error: label configuration: " << e.what() << "\n";
    return kLabelConfig;
  } catch (const ConvergenceError& e) {
    err << "error: numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kDegenerateData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, out, err);
}

}  // namespace mdh::cli
