#include "mdh/dataset.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mdh/error.hpp"

namespace mdh {

Dataset::Dataset(Matrix rows, std::vector<std::string> ids)
    : rows_(std::move(rows)), ids_(std::move(ids)) {
  if (rows_.rows() < 2) throw InputError("dataset needs at least 2 rows");
  if (rows_.cols() < 2) throw InputError("dataset needs at least 2 columns");
  if (!rows_.allFinite()) throw InputError("dataset contains non-finite values");
  if (!ids_.empty() && ids_.size() != n())
    throw InputError("row id count does not match row count");
}

bool LabeledSubset::has_both_classes() const {
  const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  return pos && neg;
}

void validate_labels(const LabeledSubset& labeled, std::size_t n) {
  if (labeled.indices.size() != labeled.labels.size())
    throw InputError("label count does not match index count");
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < labeled.size(); ++k) {
    if (labeled.indices[k] >= n) throw InputError("label index out of range");
    if (!seen.insert(labeled.indices[k]).second) throw InputError("duplicate label index");
    if (labeled.labels[k] != 1 && labeled.labels[k] != -1)
      throw InputError("labels must be +1 or -1");
  }
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  s = s.substr(a, b - a);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

enum class NumberParse { kOk, kNotANumber, kNonFinite };

NumberParse parse_double(const std::string& s, double& out) {
  if (s.empty()) return NumberParse::kNotANumber;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc::result_out_of_range) return NumberParse::kNonFinite;
  if (ec != std::errc() || ptr != last) return NumberParse::kNotANumber;
  if (!std::isfinite(out)) return NumberParse::kNonFinite;
  return NumberParse::kOk;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int conventional_sign(const std::string& s) {
  static const std::set<std::string> pos = {"+", "+1", "1", "pos", "positive", "yes", "true"};
  static const std::set<std::string> neg = {"-", "\xE2\x88\x92", "-1", "\xE2\x88\x92" "1",
                                            "neg", "negative", "no", "false", "0"};
  if (pos.count(s)) return 1;
  if (neg.count(s)) return -1;
  return 0;
}

}  // namespace

LabeledSubset map_sign_labels(const std::vector<std::string>& raw,
                              const std::optional<std::string>& positive_label,
                              std::optional<std::string>* positive_symbol,
                              std::optional<std::string>* negative_symbol) {
  std::set<std::string> symbols;
  for (const auto& s : raw)
    if (!s.empty()) symbols.insert(s);

  std::map<std::string, int> mapping;
  if (positive_label) {
    std::set<std::string> others;
    for (const auto& s : symbols) {
      if (s == *positive_label) mapping[s] = 1;
      else others.insert(s);
    }
    if (others.size() > 1)
      throw InputError("unknown label symbol '" + *std::next(others.begin()) +
                       "' (expected '" + *positive_label + "' or one other symbol)");
    for (const auto& s : others) mapping[s] = -1;
  } else {
    const bool conventional = !symbols.empty() &&
        std::all_of(symbols.begin(), symbols.end(),
                    [](const std::string& s) { return conventional_sign(s) != 0; });
    if (conventional) {
      for (const auto& s : symbols) mapping[s] = conventional_sign(s);
    } else {
      if (symbols.size() > 2)
        throw InputError("unknown label symbol '" + *std::next(symbols.begin(), 2) +
                         "' (more than two classes; declare the positive label)");
      int sign = -1;
      for (const auto& s : symbols) {  // std::set iterates in lexicographic order
        mapping[s] = sign;
        sign = 1;
      }
    }
  }

  LabeledSubset out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].empty()) continue;
    out.indices.push_back(i);
    out.labels.push_back(mapping.at(raw[i]));
  }
  for (const auto& [sym, sign] : mapping) {
    if (sign > 0 && positive_symbol) *positive_symbol = sym;
    if (sign < 0 && negative_symbol) *negative_symbol = sym;
  }
  return out;
}

CsvData parse_csv(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::optional<std::size_t> label_idx;
  std::size_t arity = 0;
  std::vector<std::vector<double>> values;
  std::vector<std::string> raw_labels;

  std::optional<std::size_t> truth_idx;
  std::vector<std::string> truth_labels;

  auto resolve = [&](const std::string& col, std::size_t ncols) -> std::size_t {
    if (!header.empty()) {
      const auto it = std::find(header.begin(), header.end(), col);
      if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    }
    if (all_digits(col)) {
      const std::size_t idx = std::stoul(col);
      if (idx >= ncols) throw InputError("column index " + col + " out of range");
      return idx;
    }
    throw InputError("unknown column '" + col + "'");
  };
  auto resolve_label_column = [&](std::size_t ncols) {
    if (options.label_column) label_idx = resolve(*options.label_column, ncols);
    if (options.truth_column) truth_idx = resolve(*options.truth_column, ncols);
    if (label_idx && truth_idx && *label_idx == *truth_idx)
      throw InputError("label and truth columns must differ");
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (options.has_header && header.empty()) {
      header = fields;
      arity = fields.size();
      resolve_label_column(arity);
      continue;
    }
    if (arity == 0) {
      arity = fields.size();
      resolve_label_column(arity);
    }
    if (fields.size() != arity)
      throw InputError("ragged row " + std::to_string(line_no) + ": expected " +
                       std::to_string(arity) + " fields, found " +
                       std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(arity);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (label_idx && c == *label_idx) {
        raw_labels.push_back(fields[c]);
        continue;
      }
      if (truth_idx && c == *truth_idx) {
        truth_labels.push_back(fields[c]);
        continue;
      }
      double x = 0.0;
      switch (parse_double(fields[c], x)) {
        case NumberParse::kOk:
          row.push_back(x);
          break;
        case NumberParse::kNonFinite:
          throw InputError("non-finite value at row " + std::to_string(line_no) +
                           ", column " + std::to_string(c + 1) + ": '" + fields[c] + "'");
        case NumberParse::kNotANumber:
          throw InputError("parse error at row " + std::to_string(line_no) + ", column " +
                           std::to_string(c + 1) + ": '" + fields[c] + "' is not a number");
      }
    }
    values.push_back(std::move(row));
  }

  if (values.empty()) throw InputError("no data rows");
  const std::size_t d = values.front().size();
  Matrix rows(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx && c != truth_idx) names.push_back(header[c]);

  CsvData out{Dataset(std::move(rows)), std::nullopt, std::move(raw_labels), std::move(names),
              std::move(truth_labels), std::nullopt, std::nullopt};
  if (label_idx && options.map_to_sign)
    out.labeled = map_sign_labels(out.raw_labels, options.positive_label, &out.positive_symbol,
                                  &out.negative_symbol);
  return out;
}

CsvData load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_csv(buf.str(), options);
}

std::pair<Dataset, Vector> center(const Dataset& ds) {
  const Vector mean = ds.rows().colwise().mean().transpose();
  Matrix centered = ds.rows().rowwise() - mean.transpose();
  return {Dataset(std::move(centered), ds.ids()), mean};
}

std::pair<Dataset, Vector> standardize(const Dataset& ds) {
  const Vector mean = ds.rows().colwise().mean().transpose();
  const Matrix centered = ds.rows().rowwise() - mean.transpose();
  Vector scale(ds.d());
  for (Eigen::Index j = 0; j < centered.cols(); ++j) {
    const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(ds.n()));
    scale(j) = sd > 0.0 ? sd : 1.0;
  }
  Matrix scaled = ds.rows();
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) scaled.col(j) /= scale(j);
  return {Dataset(std::move(scaled), ds.ids()), scale};
}

Matrix population_covariance(const Matrix& rows) {
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Matrix centered = rows.rowwise() - mean;
  Matrix cov = centered.transpose() * centered;
  cov /= static_cast<double>(rows.rows());
  return cov;
}

namespace {

constexpr std::size_t kDenseEigenMaxDim = 64;
constexpr int kPowerIterationCap = 10000;
constexpr double kPowerResidual = 1e-10;

void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

PrincipalComponents dense_components(const Matrix& cov, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigen-decomposition failed", NAN);
  const auto d = cov.rows();
  PrincipalComponents pc{Matrix(d, static_cast<Eigen::Index>(k)), Vector(k)};
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Index src = d - 1 - static_cast<Eigen::Index>(j);  // ascending order
    Vector v = solver.eigenvectors().col(src);
    v.normalize();
    fix_sign(v);
    pc.directions.col(static_cast<Eigen::Index>(j)) = v;
    pc.variances(static_cast<Eigen::Index>(j)) = std::max(0.0, solver.eigenvalues()(src));
  }
  return pc;
}

PrincipalComponents power_components(Matrix cov, std::size_t k) {
  const auto d = cov.rows();
  const double scale = std::max(cov.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  PrincipalComponents pc{Matrix(d, static_cast<Eigen::Index>(k)), Vector(k)};
  for (std::size_t j = 0; j < k; ++j) {
    // Start from the column with the largest diagonal entry, nudged so the
    // start is not orthogonal to the leading eigenvector.
    Eigen::Index start = 0;
    cov.diagonal().maxCoeff(&start);
    Vector v = Vector::Constant(d, 1e-3);
    v(start) = 1.0;
    v.normalize();
    double lambda = 0.0;
    double residual = INFINITY;
    for (int it = 0; it < kPowerIterationCap; ++it) {
      Vector w = cov * v;
      const double norm = w.norm();
      if (norm == 0.0) {
        lambda = 0.0;
        residual = 0.0;
        break;
      }
      v = w / norm;
      lambda = v.dot(cov * v);
      residual = (cov * v - lambda * v).norm() / scale;
      if (residual <= kPowerResidual) break;
    }
    if (residual > kPowerResidual)
      throw ConvergenceError("power iteration did not converge (residual " +
                                 std::to_string(residual) + ")",
                             residual);
    fix_sign(v);
    pc.directions.col(static_cast<Eigen::Index>(j)) = v;
    pc.variances(static_cast<Eigen::Index>(j)) = std::max(0.0, lambda);
    cov -= lambda * v * v.transpose();
  }
  return pc;
}

}  // namespace

PrincipalComponents principal_components(const Dataset& ds, std::size_t k) {
  if (k < 1 || k > ds.d()) throw std::invalid_argument("principal_components: need 1 <= k <= d");
  const Matrix cov = population_covariance(ds.rows());
  if (ds.d() <= kDenseEigenMaxDim) return dense_components(cov, k);
  return power_components(cov, k);
}

double bandwidth_rule(double sigma, double n) { return 0.9 * sigma * std::pow(n, -0.2); }

double default_bandwidth(const Dataset& ds) {
  const auto pc = principal_components(ds, 1);
  const double var = pc.variances(0);
  const double magnitude = ds.rows().cwiseAbs().maxCoeff();
  if (!(var > 0.0) || std::sqrt(var) <= 1e-14 * magnitude)
    throw DegenerateDataError("zero variance: dataset has no spread along its first principal component");
  return bandwidth_rule(std::sqrt(var), static_cast<double>(ds.n()));
}

}  // namespace mdh
