#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace mdh {

// Maps each true cluster id to the partition side (1 for +1, 2 for -1) that
// holds the majority of its rows. A tie goes to the smaller side, and to
// side 1 when the sides are the same size.
std::map<int, int> aggregate_clusters(std::span<const int> truth, std::span<const int> partition);

struct PartitionMetrics {
  double success_ratio = 0.0;
  double v_measure = 0.0;
  std::size_t error_count = 0;
  std::size_t success_count = 0;
  std::map<int, int> aggregate_map;
};

// Success ratio S/(S+E) over the aggregated clusters, together with the
// binary V-measure. The ratio is zero when every cluster lands on the same
// side, since then no cluster majority is separated from the rest.
PartitionMetrics success_ratio(std::span<const int> truth, std::span<const int> partition);

double binary_v_measure(std::span<const int> truth, std::span<const int> partition);

// Fraction of mismatches over rows not listed in `exclude`; with
// `allow_flip` the better of the two sign conventions is taken.
double classification_error(std::span<const int> predicted, std::span<const int> truth,
                            std::span<const std::size_t> exclude, bool allow_flip);

}  // namespace mdh
