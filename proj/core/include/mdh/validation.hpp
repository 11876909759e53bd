#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdh/dataset.hpp"

// Oracle-backed experiments shared by the validation command and the
// acceptance suite.
namespace mdh::validation {

struct Check {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> measured;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteReport {
  std::string suite;
  bool passed = false;
  std::vector<Check> checks;
  Table table;
};

// Projected-KDE value against line quadrature of the full KDE on random
// planar data; relative gap at most 1e-6.
SuiteReport run_projection_exactness(std::uint64_t seed, std::size_t datasets = 50, std::size_t planes = 20);

// Full KDE sampled on each line never exceeds the level-set bound.
SuiteReport run_level_set_bound(std::uint64_t seed, std::size_t datasets = 50, std::size_t planes = 20,
                       std::size_t samples = 1000);

// Minimisers of the penalised profile stay within eta of the feasible
// interval and of the constrained density minimiser.
SuiteReport run_penalty_calibration(std::uint64_t seed, std::size_t pairs = 100);

// Halving the bandwidth on data with a planted empty slab drives the
// minimum-density hyperplane onto the maximum-margin one.
SuiteReport run_convergence(std::uint64_t seed, std::size_t halvings = 5);

// Two planar Gaussian clouds with every point inside a slab of the given
// half-width removed, so the slab is the widest gap near the centre.
Dataset planted_slab_data(std::uint64_t seed, std::size_t n, double half_gap);

const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

}  // namespace mdh::validation
