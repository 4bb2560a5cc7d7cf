#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sofent/group.hpp"
#include "sofent/measures.hpp"
#include "sofent/processes.hpp"
#include "sofent/sofic.hpp"

namespace sofent {

using Cycle = std::vector<Vertex>;

// Disjoint length-l paths along sigma^h plus the leftover vertices.
struct PathPartition {
  std::size_t l = 0;
  std::vector<std::vector<Vertex>> paths;
  std::vector<Vertex> leftover;  // sorted
  std::size_t vertex_count = 0;

  // path_index()[v]: the path containing v, or -1.
  std::vector<std::int64_t> path_index() const;
  // Validates disjointness, coverage of {0..vertex_count-1} and path lengths.
  void validate() const;
};

// Cycles of sigma^h, each starting at its least vertex, ordered by that
// vertex.
std::vector<Cycle> extract_cycles(const SoficMap& sigma, const GroupWord& h);

// floor(c / l) consecutive paths per cycle of length c, cut starting at
// position cut_offset (mod c) of the cycle.
PathPartition partition_paths(std::span<const Cycle> cycles, std::size_t l,
                              std::size_t cut_offset = 0);

// Blocks = paths carrying nu_l; filler a0 on the leftover vertices.
BlockProductMeasure build_model_measure(const ProcessOracle& nu, const PathPartition& partition,
                                        std::span<const Symbol> a0);
BlockProductMeasure build_model_measure(const ProcessOracle& nu, const PathPartition& partition,
                                        Symbol a0 = 0);

// Fraction of V covered by length-l paths.
double check_condition_a(const PathPartition& partition);

// Per pair (g, g'), the fraction of v with (sigma^g)^-1 (sigma^h)^p sigma^g' v = v
// for some |p| <= l. Pairs must lie in distinct right cosets of <h>.
std::vector<double> check_condition_b(const SoficMap& sigma, const GroupWord& h,
                                      std::span<const std::pair<GroupWord, GroupWord>> pairs,
                                      std::size_t l);

struct ScheduleThresholds {
  double a = 0.05;  // coverage must be >= 1 - a
  double b = 0.05;  // every pair fraction must be <= b
  std::size_t l_cap = 64;
};

struct ScheduleEntry {
  std::size_t n = 0;
  std::size_t l = 0;
  double coverage = 0.0;
  std::vector<double> pair_fractions;
};

// For each map, the largest l in [2, l_cap] meeting the thresholds. Throws
// NoFeasibleSchedule when none does.
std::vector<ScheduleEntry> schedule_l(std::span<const SoficMap> sigmas, const GroupWord& h,
                                      std::span<const std::pair<GroupWord, GroupWord>> pairs,
                                      const ScheduleThresholds& thresholds);

}  // namespace sofent
