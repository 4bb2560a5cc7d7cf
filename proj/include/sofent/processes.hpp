#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sofent/group.hpp"
#include "sofent/measures.hpp"

namespace sofent {

// A G-process given by its finite-dimensional marginals.
//
// marginal(F) is a measure on A^F whose site i is F[i]; F must consist of
// distinct elements. Oracles are immutable and safe to query concurrently.
class ProcessOracle {
 public:
  virtual ~ProcessOracle() = default;

  virtual std::size_t alphabet() const = 0;
  virtual const GroupPresentation& group() const = 0;
  virtual BlockProductMeasure marginal(std::span<const GroupWord> F) const = 0;

  double marginal_entropy(std::span<const GroupWord> F) const { return entropy(marginal(F)); }
  ExplicitMeasure explicit_marginal(std::span<const GroupWord> F,
                                    std::size_t cap = kDefaultEnumCap) const {
    return to_explicit(marginal(F), cap);
  }

  // For Z-processes: the law nu_l of (X_0, ..., X_{l-1}) as a single block.
  virtual BlockLaw interval_law(std::size_t length) const;
  virtual std::string describe() const = 0;

 protected:
  void require_distinct(std::span<const GroupWord> F) const;
};

using ProcessPtr = std::shared_ptr<const ProcessOracle>;

class BernoulliProcess final : public ProcessOracle {
 public:
  BernoulliProcess(std::vector<double> eta, GroupPresentation group);

  std::size_t alphabet() const override { return eta_.size(); }
  const GroupPresentation& group() const override { return group_; }
  const std::vector<double>& eta() const { return eta_; }
  BlockProductMeasure marginal(std::span<const GroupWord> F) const override;
  BlockLaw interval_law(std::size_t length) const override;
  std::string describe() const override;

 private:
  std::vector<double> eta_;
  GroupPresentation group_;
};

// Stationary Markov chain indexed by Z.
class MarkovProcess final : public ProcessOracle {
 public:
  MarkovProcess(Matrix transition, std::vector<double> stationary);

  // Two states, switching with probability `flip` at each step.
  static MarkovProcess symmetric_flip(double flip);

  std::size_t alphabet() const override { return transition_.k; }
  const GroupPresentation& group() const override { return group_; }
  const Matrix& transition() const { return transition_; }
  const std::vector<double>& stationary() const { return stationary_; }
  BlockProductMeasure marginal(std::span<const GroupWord> F) const override;
  BlockLaw interval_law(std::size_t length) const override;
  std::string describe() const override;

 private:
  Matrix transition_;
  std::vector<double> stationary_;
  GroupPresentation group_;
};

// Independent copies of a Z-process along the right cosets of <h>:
// x(h^i t) for fixed t is distributed as the Z-process in i.
class CoinducedProcess final : public ProcessOracle {
 public:
  CoinducedProcess(ProcessPtr base, GroupWord h, GroupPresentation group);

  std::size_t alphabet() const override { return base_->alphabet(); }
  const GroupPresentation& group() const override { return group_; }
  const ProcessOracle& base() const { return *base_; }
  const ProcessPtr& base_ptr() const { return base_; }
  const GroupWord& h() const { return h_; }
  BlockProductMeasure marginal(std::span<const GroupWord> F) const override;
  std::string describe() const override;

 private:
  ProcessPtr base_;
  GroupWord h_;
  GroupPresentation group_;
};

ProcessPtr bernoulli_process(std::vector<double> eta, GroupPresentation group);
ProcessPtr markov_process(Matrix transition, std::vector<double> stationary);
ProcessPtr coinduce(ProcessPtr base, GroupWord h, GroupPresentation group);

// Integers as words of Z.
std::vector<GroupWord> integer_words(std::span<const std::int64_t> values);

struct MixingRadius {
  std::optional<std::int64_t> radius;  // least passing gap, if any
  std::size_t window = 0;
  double epsilon = 0.0;
  std::size_t q_max = 0;
  std::int64_t gap_cap = 0;
  double window_entropy = 0.0;  // H(nu_L)
  // Family tested: q equally gapped length-L intervals, 2 <= q <= q_max,
  // gap = start of the next interval minus end of the previous one.
  std::string family;
  struct Row {
    std::int64_t gap;
    std::size_t q;
    double joint_entropy;
    double target;
    bool pass;
  };
  std::vector<Row> rows;
};

// The least gap r0 in [1, gap_cap] such that q equally gapped length-L
// windows at gap r0 carry joint entropy >= q (H(nu_L) - eps) for every
// 2 <= q <= q_max.
MixingRadius uniform_mixing_radius(const ProcessOracle& nu, std::size_t window, double eps,
                                   std::int64_t gap_cap, std::size_t q_max = 4);

// Positions of q length-L windows separated by `gap`.
std::vector<std::int64_t> gapped_windows(std::size_t window, std::size_t q, std::int64_t gap);

}  // namespace sofent
