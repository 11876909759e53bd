#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdh/types.hpp"

namespace mdh {

// n observations in d dimensions, one observation per row.
//
// Construction enforces n >= 2, d >= 2 and finite entries; an instance is
// always valid.
class Dataset {
 public:
  explicit Dataset(Matrix rows, std::vector<std::string> ids = {});

  const Matrix& rows() const noexcept { return rows_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  Matrix rows_;
  std::vector<std::string> ids_;
};

// Row indices carrying a +1/-1 label.
struct LabeledSubset {
  std::vector<std::size_t> indices;
  std::vector<int> labels;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  bool has_both_classes() const;
};

// Checks distinct, in-range indices and labels in {-1,+1}. Throws InputError.
void validate_labels(const LabeledSubset& labeled, std::size_t n);

struct CsvOptions {
  bool has_header = false;
  // Column name (requires a header) or zero-based index, as text.
  std::optional<std::string> label_column;
  // Label string mapped to +1. When absent, the conventional sign symbols
  // ("+", "-", "1", "-1", ...) are recognised; otherwise the lexicographically
  // smallest of two symbols maps to -1.
  std::optional<std::string> positive_label;
  // When false the label column is returned raw (multi-class ground truth)
  // and no LabeledSubset is built.
  bool map_to_sign = true;
  // Optional evaluation-only column, excluded from the features and
  // returned raw in CsvData::truth_labels.
  std::optional<std::string> truth_column;
};

struct CsvData {
  Dataset dataset;
  std::optional<LabeledSubset> labeled;
  // Raw label cell per row ("" for unlabelled); empty when no label column.
  std::vector<std::string> raw_labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> truth_labels;
  std::optional<std::string> positive_symbol;
  std::optional<std::string> negative_symbol;
};

// Throws InputError naming the 1-based file line and column on parse errors.
CsvData load_csv(const std::string& path, const CsvOptions& options);
CsvData parse_csv(const std::string& text, const CsvOptions& options);

// Maps label strings to +1/-1 using the same rules as load_csv. Empty strings
// are unlabelled rows.
LabeledSubset map_sign_labels(const std::vector<std::string>& raw,
                              const std::optional<std::string>& positive_label,
                              std::optional<std::string>* positive_symbol = nullptr,
                              std::optional<std::string>* negative_symbol = nullptr);

// Column means subtracted; mean returned so that b_original = b + v.mean.
std::pair<Dataset, Vector> center(const Dataset& ds);

// Per-feature division by the population standard deviation (columns with
// zero spread are left as is). Returns the scale factors.
std::pair<Dataset, Vector> standardize(const Dataset& ds);

Matrix population_covariance(const Matrix& rows);

struct PrincipalComponents {
  Matrix directions;  // d x k, unit columns
  Vector variances;   // nonincreasing
};

// Top-k eigenvectors of the population covariance. The sign of each
// direction is fixed so its largest-magnitude coordinate is positive.
PrincipalComponents principal_components(const Dataset& ds, std::size_t k);

// Silverman-style rule 0.9 * sigma * n^(-1/5).
double bandwidth_rule(double sigma, double n);

// 0.9 * sd(projections on pc1) * n^(-1/5). Throws DegenerateDataError when
// the data have no spread.
double default_bandwidth(const Dataset& ds);

}  // namespace mdh
