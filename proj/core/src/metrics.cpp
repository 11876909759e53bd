#include "mdh/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mdh {

namespace {

void check_inputs(std::span<const int> truth, std::span<const int> partition) {
  if (truth.size() != partition.size())
    throw std::invalid_argument("truth and partition lengths differ");
  for (int s : partition)
    if (s != 1 && s != -1) throw std::invalid_argument("partition entries must be +1 or -1");
}

int side_of(int sign) { return sign > 0 ? 1 : 2; }

// counts[c][s]: rows of aggregated class c (0 or 1) on partition side s.
using Table = std::array<std::array<std::size_t, 2>, 2>;

Table contingency(std::span<const int> truth, std::span<const int> partition,
                  const std::map<int, int>& agg) {
  Table t{};
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++t[agg.at(truth[i]) - 1][side_of(partition[i]) - 1];
  return t;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace

std::map<int, int> aggregate_clusters(std::span<const int> truth, std::span<const int> partition) {
  check_inputs(truth, partition);
  std::map<int, std::array<std::size_t, 2>> per_cluster;
  std::array<std::size_t, 2> side_size{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int s = side_of(partition[i]) - 1;
    ++per_cluster[truth[i]][s];
    ++side_size[s];
  }
  const int smaller = side_size[1] < side_size[0] ? 2 : 1;
  std::map<int, int> out;
  for (const auto& [id, c] : per_cluster) {
    if (c[0] > c[1]) out[id] = 1;
    else if (c[1] > c[0]) out[id] = 2;
    else out[id] = smaller;
  }
  return out;
}

PartitionMetrics success_ratio(std::span<const int> truth, std::span<const int> partition) {
  PartitionMetrics m;
  m.aggregate_map = aggregate_clusters(truth, partition);
  const Table t = contingency(truth, partition, m.aggregate_map);
  m.error_count = std::min(t[0][0] + t[1][1], t[1][0] + t[0][1]);
  m.success_count = std::min(std::max(t[0][0], t[1][0]), std::max(t[0][1], t[1][1]));
  const bool one_aggregate = t[0][0] + t[0][1] == 0 || t[1][0] + t[1][1] == 0;
  const std::size_t total = m.success_count + m.error_count;
  m.success_ratio = (one_aggregate || total == 0)
                        ? 0.0
                        : static_cast<double>(m.success_count) / static_cast<double>(total);
  m.v_measure = binary_v_measure(truth, partition);
  return m;
}

double binary_v_measure(std::span<const int> truth, std::span<const int> partition) {
  const Table t = contingency(truth, partition, aggregate_clusters(truth, partition));
  const double n = static_cast<double>(truth.size());
  if (n == 0.0) return 0.0;

  std::array<double, 2> pc{}, pk{};
  std::array<double, 4> joint{};
  for (int c = 0; c < 2; ++c)
    for (int s = 0; s < 2; ++s) {
      const double p = static_cast<double>(t[c][s]) / n;
      pc[c] += p;
      pk[s] += p;
      joint[2 * c + s] = p;
    }
  const double h_c = entropy(pc);
  const double h_k = entropy(pk);
  const double h_joint = entropy(joint);
  // H(C|K) = H(C,K) - H(K), H(K|C) = H(C,K) - H(C).
  const double homogeneity = h_c == 0.0 ? 1.0 : 1.0 - (h_joint - h_k) / h_c;
  const double completeness = h_k == 0.0 ? 1.0 : 1.0 - (h_joint - h_c) / h_k;
  if (homogeneity + completeness == 0.0) return 0.0;
  const double v = 2.0 * homogeneity * completeness / (homogeneity + completeness);
  return std::clamp(v, 0.0, 1.0);
}

double classification_error(std::span<const int> predicted, std::span<const int> truth,
                            std::span<const std::size_t> exclude, bool allow_flip) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("predicted and truth lengths differ");
  std::vector<bool> skip(truth.size(), false);
  for (std::size_t i : exclude) {
    if (i >= truth.size()) throw std::invalid_argument("excluded index out of range");
    skip[i] = true;
  }
  std::size_t count = 0, wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (skip[i]) continue;
    ++count;
    if (predicted[i] != truth[i]) ++wrong;
  }
  if (count == 0) throw std::invalid_argument("empty evaluation set");
  const double err = static_cast<double>(wrong) / static_cast<double>(count);
  return allow_flip ? std::min(err, 1.0 - err) : err;
}

}  // namespace mdh
