#include "sofent/construction.hpp"

#include <algorithm>
#include <string>

#include "sofent/error.hpp"

namespace sofent {

std::vector<std::int64_t> PathPartition::path_index() const {
  std::vector<std::int64_t> index(vertex_count, -1);
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (Vertex v : paths[p]) index.at(v) = static_cast<std::int64_t>(p);
  return index;
}

void PathPartition::validate() const {
  if (l < 1) throw InvalidArgument("path length must be positive");
  std::vector<char> seen(vertex_count, 0);
  auto mark = [&](Vertex v) {
    if (v >= vertex_count) throw InvalidArgument("partition vertex out of range");
    if (seen[v]) throw InvalidArgument("partition covers vertex " + std::to_string(v) + " twice");
    seen[v] = 1;
  };
  for (const auto& path : paths) {
    if (path.size() != l) throw InvalidArgument("path of length != l");
    for (Vertex v : path) mark(v);
  }
  for (Vertex v : leftover) mark(v);
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw InvalidArgument("partition does not cover every vertex");
}

std::vector<Cycle> extract_cycles(const SoficMap& sigma, const GroupWord& h) {
  Permutation p = sigma.permutation(h);
  std::vector<char> seen(p.size(), 0);
  std::vector<Cycle> cycles;
  for (std::size_t start = 0; start < p.size(); ++start) {
    if (seen[start]) continue;
    Cycle c;
    for (Vertex v = static_cast<Vertex>(start); !seen[v]; v = p(v)) {
      seen[v] = 1;
      c.push_back(v);
    }
    cycles.push_back(std::move(c));
  }
  return cycles;
}

PathPartition partition_paths(std::span<const Cycle> cycles, std::size_t l, std::size_t cut_offset) {
  if (l < 1) throw InvalidArgument("path length l must be at least 1");
  PathPartition out;
  out.l = l;
  for (const auto& c : cycles) {
    const std::size_t len = c.size();
    out.vertex_count += len;
    if (len == 0) continue;
    const std::size_t shift = cut_offset % len;
    const std::size_t count = len / l;
    for (std::size_t j = 0; j < count; ++j) {
      std::vector<Vertex> path(l);
      for (std::size_t i = 0; i < l; ++i) path[i] = c[(shift + j * l + i) % len];
      out.paths.push_back(std::move(path));
    }
    for (std::size_t i = count * l; i < len; ++i) out.leftover.push_back(c[(shift + i) % len]);
  }
  std::sort(out.leftover.begin(), out.leftover.end());
  return out;
}

BlockProductMeasure build_model_measure(const ProcessOracle& nu, const PathPartition& partition,
                                        std::span<const Symbol> a0) {
  if (a0.size() != partition.vertex_count)
    throw InvalidArgument("filler configuration size != |V|");
  for (Symbol s : a0)
    if (s >= nu.alphabet()) throw InvalidArgument("filler symbol outside the process alphabet");
  std::vector<Vertex> sites(partition.vertex_count);
  for (std::size_t v = 0; v < sites.size(); ++v) sites[v] = static_cast<Vertex>(v);
  std::vector<Block> blocks;
  blocks.reserve(partition.paths.size());
  for (const auto& path : partition.paths) blocks.push_back({path, 0});
  std::vector<std::pair<Vertex, Symbol>> filler;
  for (Vertex v : partition.leftover) filler.emplace_back(v, a0[v]);
  std::vector<BlockLaw> laws;
  if (!blocks.empty()) laws.push_back(nu.interval_law(partition.l));
  return BlockProductMeasure(nu.alphabet(), std::move(sites), std::move(laws), std::move(blocks),
                             std::move(filler));
}

BlockProductMeasure build_model_measure(const ProcessOracle& nu, const PathPartition& partition,
                                        Symbol a0) {
  std::vector<Symbol> config(partition.vertex_count, a0);
  return build_model_measure(nu, partition, config);
}

double check_condition_a(const PathPartition& partition) {
  if (partition.vertex_count == 0) return 0.0;
  return 1.0 - static_cast<double>(partition.leftover.size()) /
                   static_cast<double>(partition.vertex_count);
}

std::vector<double> check_condition_b(const SoficMap& sigma, const GroupWord& h,
                                      std::span<const std::pair<GroupWord, GroupWord>> pairs,
                                      std::size_t l) {
  const auto span = static_cast<std::int64_t>(l);
  // (sigma^h)^p is evaluated as a power of sigma^h, so only h and the pair
  // words need to be within budget.
  DefectReport report = defect_report(sigma, {}, h, pairs, -span, span);
  std::vector<double> out;
  for (const auto& pair : report.pairs) out.push_back(pair.fixed_fraction);
  return out;
}

std::vector<ScheduleEntry> schedule_l(std::span<const SoficMap> sigmas, const GroupWord& h,
                                      std::span<const std::pair<GroupWord, GroupWord>> pairs,
                                      const ScheduleThresholds& thresholds) {
  if (!(thresholds.a > 0.0 && thresholds.a <= 1.0) || !(thresholds.b > 0.0 && thresholds.b <= 1.0))
    throw InvalidArgument("schedule thresholds must lie in (0, 1]");
  std::vector<ScheduleEntry> out;
  for (const auto& sigma : sigmas) {
    auto cycles = extract_cycles(sigma, h);
    bool found = false;
    for (std::size_t l = thresholds.l_cap; l >= 2 && !found; --l) {
      double coverage = check_condition_a(partition_paths(cycles, l));
      if (coverage < 1.0 - thresholds.a) continue;
      auto fractions = check_condition_b(sigma, h, pairs, l);
      if (std::any_of(fractions.begin(), fractions.end(),
                      [&](double f) { return f > thresholds.b; }))
        continue;
      out.push_back({sigma.size(), l, coverage, std::move(fractions)});
      found = true;
    }
    if (!found)
      throw NoFeasibleSchedule("no l in [2, " + std::to_string(thresholds.l_cap) +
                               "] meets the thresholds for n = " + std::to_string(sigma.size()));
  }
  return out;
}

}  // namespace sofent
