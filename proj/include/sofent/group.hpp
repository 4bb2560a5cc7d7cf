#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sofent {

enum class GroupKind { FreeAbelian, Free };

// One syllable x_gen^exp of a reduced word in a free group.
struct Syllable {
  int generator = 0;
  std::int64_t exponent = 0;

  auto operator<=>(const Syllable&) const = default;
};

// An element of Z^d (exponent vector) or F_k (reduced syllable list).
//
// The empty syllable list / zero vector is the identity. Words built through
// the public constructors are always in normal form: free-group syllables have
// nonzero exponents and adjacent syllables use distinct generators.
class GroupWord {
 public:
  GroupWord() = default;

  static GroupWord identity(GroupKind kind, int rank);
  static GroupWord abelian(std::vector<std::int64_t> exponents);
  static GroupWord free(int rank, std::vector<Syllable> syllables);
  static GroupWord generator(GroupKind kind, int rank, int index, std::int64_t exponent = 1);

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }
  bool is_identity() const;

  // Valid only for FreeAbelian words.
  const std::vector<std::int64_t>& exponents() const { return exponents_; }
  // Valid only for Free words.
  const std::vector<Syllable>& syllables() const { return syllables_; }

  // Number of generator letters (sum of absolute exponents).
  std::int64_t letter_count() const;

  bool same_group(const GroupWord& other) const {
    return kind_ == other.kind_ && rank_ == other.rank_;
  }

  auto operator<=>(const GroupWord&) const = default;
  bool operator==(const GroupWord&) const = default;

 private:
  GroupKind kind_ = GroupKind::FreeAbelian;
  int rank_ = 0;
  std::vector<std::int64_t> exponents_;
  std::vector<Syllable> syllables_;
};

GroupWord mul(const GroupWord& a, const GroupWord& b);
GroupWord inverse(const GroupWord& g);
GroupWord power(const GroupWord& g, std::int64_t k);

// Stable text key: "e" for the identity; "1,-2" for Z^d; "a^2 b^-1" for F_k.
std::string word_key(const GroupWord& g);

struct CosetDecomposition {
  GroupWord h;
  std::int64_t lo = 0;  // I = [lo, hi]
  std::int64_t hi = 0;
  std::vector<GroupWord> transversal;  // t_1..t_m, pairwise distinct cosets
  // F' = { h^i t_k }, ordered by k then i: index k * |I| + (i - lo).
  std::vector<GroupWord> enlarged;
  // For each input element: its coset index and exponent, g = h^i t_k.
  std::vector<std::size_t> input_coset;
  std::vector<std::int64_t> input_exponent;

  std::size_t interval_size() const { return static_cast<std::size_t>(hi - lo + 1); }
  std::size_t coset_count() const { return transversal.size(); }
  const GroupWord& element(std::size_t k, std::int64_t i) const {
    return enlarged[k * interval_size() + static_cast<std::size_t>(i - lo)];
  }
};

// A supported group with a weighted word metric.
class GroupPresentation {
 public:
  GroupPresentation(GroupKind kind, int rank, std::vector<double> weights = {});

  static GroupPresentation integers() { return {GroupKind::FreeAbelian, 1}; }

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }
  const std::vector<double>& weights() const { return weights_; }

  GroupWord identity() const { return GroupWord::identity(kind_, rank_); }
  GroupWord generator(int index, std::int64_t exponent = 1) const {
    return GroupWord::generator(kind_, rank_, index, exponent);
  }
  bool contains(const GroupWord& g) const { return g.kind() == kind_ && g.rank() == rank_; }
  void require(const GroupWord& g) const;

  // rho(g, 1_G): the least total weight of a word representing g.
  double word_metric(const GroupWord& g) const;
  // rho(a, b) = rho(a b^-1, 1_G) (right-invariant).
  double distance(const GroupWord& a, const GroupWord& b) const;

  // B_rho(1_G, r), sorted. Throws CapExceeded past `cap` elements.
  std::vector<GroupWord> ball(double r, std::size_t cap = 1'000'000) const;

  // Canonical representative t of the right coset <h> g and the exponent i
  // with g = h^i t. Throws TorsionError for h = 1_G.
  std::pair<GroupWord, std::int64_t> coset_representative(const GroupWord& g,
                                                          const GroupWord& h) const;
  bool same_right_coset(const GroupWord& a, const GroupWord& b, const GroupWord& h) const;

  // Writes F inside a union of translated intervals h^I t_k with |I| minimal.
  CosetDecomposition coset_decompose(std::span<const GroupWord> F, const GroupWord& h) const;

  GroupWord parse_word(const std::string& key) const;

  bool operator==(const GroupPresentation&) const = default;

 private:
  GroupKind kind_;
  int rank_;
  std::vector<double> weights_;
};

// Metric tolerance for comparisons of sums of generator weights.
inline constexpr double kMetricTol = 1e-9;

}  // namespace sofent
