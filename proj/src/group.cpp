#include "sofent/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "sofent/error.hpp"

namespace sofent {

namespace {

// Appends a syllable to a reduced word, merging or cancelling at the end.
void push_syllable(std::vector<Syllable>& word, Syllable s) {
  if (s.exponent == 0) return;
  while (true) {
    if (word.empty() || word.back().generator != s.generator) {
      word.push_back(s);
      return;
    }
    std::int64_t e = word.back().exponent + s.exponent;
    word.pop_back();
    if (e == 0) return;
    s.exponent = e;
  }
}

struct Letter {
  int generator;
  int sign;
  auto operator<=>(const Letter&) const = default;
};

std::vector<Letter> to_letters(const GroupWord& g) {
  std::vector<Letter> out;
  for (const auto& s : g.syllables()) {
    int sign = s.exponent > 0 ? 1 : -1;
    for (std::int64_t k = 0; k < std::abs(s.exponent); ++k) out.push_back({s.generator, sign});
  }
  return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void enumerate_abelian(const std::vector<double>& w, std::size_t coord, double budget,
                       std::vector<std::int64_t>& cur, std::vector<GroupWord>& out,
                       std::size_t cap) {
  if (coord == w.size()) {
    if (out.size() >= cap) throw CapExceeded("ball size exceeds cap " + std::to_string(cap));
    out.push_back(GroupWord::abelian(cur));
    return;
  }
  auto max_e = static_cast<std::int64_t>(std::floor((budget + kMetricTol) / w[coord]));
  for (std::int64_t e = -max_e; e <= max_e; ++e) {
    cur[coord] = e;
    double used = static_cast<double>(std::abs(e)) * w[coord];
    enumerate_abelian(w, coord + 1, budget - used, cur, out, cap);
  }
  cur[coord] = 0;
}

void enumerate_free(const std::vector<double>& w, int rank, double budget,
                    std::vector<Syllable>& cur, std::vector<GroupWord>& out, std::size_t cap) {
  if (out.size() >= cap) throw CapExceeded("ball size exceeds cap " + std::to_string(cap));
  out.push_back(GroupWord::free(rank, cur));
  for (int gen = 0; gen < rank; ++gen) {
    if (w[gen] > budget + kMetricTol) continue;
    for (int sign : {1, -1}) {
      if (!cur.empty() && cur.back().generator == gen) {
        // Only extend the current syllable in its own direction.
        if ((cur.back().exponent > 0) != (sign > 0)) continue;
        cur.back().exponent += sign;
        enumerate_free(w, rank, budget - w[gen], cur, out, cap);
        cur.back().exponent -= sign;
      } else {
        cur.push_back({gen, sign});
        enumerate_free(w, rank, budget - w[gen], cur, out, cap);
        cur.pop_back();
      }
    }
  }
}

char generator_letter(int g) { return static_cast<char>('a' + g); }

}  // namespace

GroupWord GroupWord::identity(GroupKind kind, int rank) {
  GroupWord w;
  w.kind_ = kind;
  w.rank_ = rank;
  if (kind == GroupKind::FreeAbelian) w.exponents_.assign(static_cast<std::size_t>(rank), 0);
  return w;
}

GroupWord GroupWord::abelian(std::vector<std::int64_t> exponents) {
  GroupWord w;
  w.kind_ = GroupKind::FreeAbelian;
  w.rank_ = static_cast<int>(exponents.size());
  w.exponents_ = std::move(exponents);
  return w;
}

GroupWord GroupWord::free(int rank, std::vector<Syllable> syllables) {
  GroupWord w;
  w.kind_ = GroupKind::Free;
  w.rank_ = rank;
  for (const auto& s : syllables) {
    if (s.generator < 0 || s.generator >= rank)
      throw InvalidArgument("generator index out of range");
    push_syllable(w.syllables_, s);
  }
  return w;
}

GroupWord GroupWord::generator(GroupKind kind, int rank, int index, std::int64_t exponent) {
  if (index < 0 || index >= rank) throw InvalidArgument("generator index out of range");
  if (kind == GroupKind::FreeAbelian) {
    std::vector<std::int64_t> e(static_cast<std::size_t>(rank), 0);
    e[static_cast<std::size_t>(index)] = exponent;
    return abelian(std::move(e));
  }
  return free(rank, {{index, exponent}});
}

bool GroupWord::is_identity() const {
  if (kind_ == GroupKind::Free) return syllables_.empty();
  return std::all_of(exponents_.begin(), exponents_.end(), [](auto e) { return e == 0; });
}

std::int64_t GroupWord::letter_count() const {
  std::int64_t n = 0;
  for (auto e : exponents_) n += std::abs(e);
  for (const auto& s : syllables_) n += std::abs(s.exponent);
  return n;
}

GroupWord mul(const GroupWord& a, const GroupWord& b) {
  if (!a.same_group(b)) throw InvalidArgument("mul: words from mismatched presentations");
  if (a.kind() == GroupKind::FreeAbelian) {
    auto e = a.exponents();
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.exponents()[i];
    return GroupWord::abelian(std::move(e));
  }
  std::vector<Syllable> out = a.syllables();
  for (const auto& s : b.syllables()) push_syllable(out, s);
  return GroupWord::free(a.rank(), std::move(out));
}

GroupWord inverse(const GroupWord& g) {
  if (g.kind() == GroupKind::FreeAbelian) {
    auto e = g.exponents();
    for (auto& x : e) x = -x;
    return GroupWord::abelian(std::move(e));
  }
  std::vector<Syllable> out(g.syllables().rbegin(), g.syllables().rend());
  for (auto& s : out) s.exponent = -s.exponent;
  return GroupWord::free(g.rank(), std::move(out));
}

GroupWord power(const GroupWord& g, std::int64_t k) {
  GroupWord base = k < 0 ? inverse(g) : g;
  std::int64_t n = k < 0 ? -k : k;
  if (g.kind() == GroupKind::FreeAbelian) {
    auto e = base.exponents();
    for (auto& x : e) x *= n;
    return GroupWord::abelian(std::move(e));
  }
  GroupWord result = GroupWord::identity(g.kind(), g.rank());
  while (n > 0) {
    if (n & 1) result = mul(result, base);
    base = mul(base, base);
    n >>= 1;
  }
  return result;
}

std::string word_key(const GroupWord& g) {
  if (g.is_identity()) return "e";
  std::ostringstream os;
  if (g.kind() == GroupKind::FreeAbelian) {
    for (std::size_t i = 0; i < g.exponents().size(); ++i) {
      if (i) os << ',';
      os << g.exponents()[i];
    }
    return os.str();
  }
  bool first = true;
  for (const auto& s : g.syllables()) {
    if (!first) os << ' ';
    first = false;
    os << generator_letter(s.generator);
    if (s.exponent != 1) os << '^' << s.exponent;
  }
  return os.str();
}

GroupPresentation::GroupPresentation(GroupKind kind, int rank, std::vector<double> weights)
    : kind_(kind), rank_(rank), weights_(std::move(weights)) {
  if (rank < 1) throw InvalidArgument("group rank must be at least 1");
  if (kind == GroupKind::Free && rank > 26) throw InvalidArgument("free rank above 26 unsupported");
  if (weights_.empty()) weights_.assign(static_cast<std::size_t>(rank), 1.0);
  if (weights_.size() != static_cast<std::size_t>(rank))
    throw InvalidArgument("weights: expected one weight per generator");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive and finite");
}

void GroupPresentation::require(const GroupWord& g) const {
  if (!contains(g)) throw InvalidArgument("word " + word_key(g) + " is not in this presentation");
}

double GroupPresentation::word_metric(const GroupWord& g) const {
  require(g);
  // Z^d: each generator must be used at least |e_i| times. F_k: the reduced
  // word is the unique geodesic.
  double total = 0.0;
  if (kind_ == GroupKind::FreeAbelian) {
    for (std::size_t i = 0; i < g.exponents().size(); ++i)
      total += static_cast<double>(std::abs(g.exponents()[i])) * weights_[i];
  } else {
    for (const auto& s : g.syllables())
      total += static_cast<double>(std::abs(s.exponent)) * weights_[static_cast<std::size_t>(s.generator)];
  }
  return total;
}

double GroupPresentation::distance(const GroupWord& a, const GroupWord& b) const {
  return word_metric(mul(a, inverse(b)));
}

std::vector<GroupWord> GroupPresentation::ball(double r, std::size_t cap) const {
  if (!(r >= 0.0)) throw InvalidArgument("ball radius must be nonnegative");
  std::vector<GroupWord> out;
  if (kind_ == GroupKind::FreeAbelian) {
    std::vector<std::int64_t> cur(static_cast<std::size_t>(rank_), 0);
    enumerate_abelian(weights_, 0, r, cur, out, cap);
  } else {
    std::vector<Syllable> cur;
    enumerate_free(weights_, rank_, r, cur, out, cap);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<GroupWord, std::int64_t> GroupPresentation::coset_representative(
    const GroupWord& g, const GroupWord& h) const {
  require(g);
  require(h);
  if (h.is_identity()) throw TorsionError("h has finite order (h = 1_G)");
  if (kind_ == GroupKind::FreeAbelian) {
    const auto& he = h.exponents();
    std::size_t j = 0;
    while (he[j] == 0) ++j;
    std::int64_t mag = std::abs(he[j]);
    std::int64_t i = floor_div(g.exponents()[j], mag) * (he[j] > 0 ? 1 : -1);
    return {mul(power(h, -i), g), i};
  }
  // Free group: the coset element of fewest letters, ties broken by the
  // letter sequence. |h^j g| >= |j| - |g| bounds the search window.
  std::int64_t bound = 2 * g.letter_count() + 2;
  GroupWord best;
  std::int64_t best_j = 0;
  std::int64_t best_len = std::numeric_limits<std::int64_t>::max();
  std::vector<Letter> best_letters;
  for (std::int64_t j = -bound; j <= bound; ++j) {
    GroupWord cand = mul(power(h, j), g);
    std::int64_t len = cand.letter_count();
    if (len > best_len) continue;
    auto letters = to_letters(cand);
    if (len < best_len || letters < best_letters) {
      best = cand;
      best_j = j;
      best_len = len;
      best_letters = std::move(letters);
    }
  }
  // best = h^j g, so g = h^-j best.
  return {best, -best_j};
}

bool GroupPresentation::same_right_coset(const GroupWord& a, const GroupWord& b,
                                         const GroupWord& h) const {
  return coset_representative(a, h).first == coset_representative(b, h).first;
}

CosetDecomposition GroupPresentation::coset_decompose(std::span<const GroupWord> F,
                                                      const GroupWord& h) const {
  if (F.empty()) throw InvalidArgument("coset_decompose: empty set");
  CosetDecomposition out;
  out.h = h;
  // Canonical transversal first, in order of first appearance.
  std::map<GroupWord, std::size_t> index;
  std::vector<std::int64_t> lo, hi;
  for (const auto& g : F) {
    auto [t, i] = coset_representative(g, h);
    auto [it, inserted] = index.emplace(t, out.transversal.size());
    if (inserted) {
      out.transversal.push_back(t);
      lo.push_back(i);
      hi.push_back(i);
    }
    std::size_t k = it->second;
    lo[k] = std::min(lo[k], i);
    hi[k] = std::max(hi[k], i);
    out.input_coset.push_back(k);
    out.input_exponent.push_back(i);
  }
  // Common interval length is the widest per-coset span. The interval is
  // anchored at the first widest coset; narrower cosets keep their canonical
  // representative when they fit and are re-anchored otherwise.
  std::size_t widest = 0;
  for (std::size_t k = 1; k < lo.size(); ++k)
    if (hi[k] - lo[k] > hi[widest] - lo[widest]) widest = k;
  out.lo = lo[widest];
  out.hi = hi[widest];
  for (std::size_t k = 0; k < out.transversal.size(); ++k) {
    if (lo[k] >= out.lo && hi[k] <= out.hi) continue;
    std::int64_t shift = lo[k] - out.lo;
    out.transversal[k] = mul(power(h, shift), out.transversal[k]);
    for (std::size_t j = 0; j < F.size(); ++j)
      if (out.input_coset[j] == k) out.input_exponent[j] -= shift;
  }
  for (std::size_t k = 0; k < out.transversal.size(); ++k)
    for (std::int64_t i = out.lo; i <= out.hi; ++i)
      out.enlarged.push_back(mul(power(h, i), out.transversal[k]));
  return out;
}

GroupWord GroupPresentation::parse_word(const std::string& key) const {
  if (key == "e" || key.empty()) return identity();
  if (kind_ == GroupKind::FreeAbelian) {
    std::vector<std::int64_t> e;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        e.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw InvalidArgument("bad word key '" + key + "'");
      }
    }
    if (e.size() != static_cast<std::size_t>(rank_))
      throw InvalidArgument("word key '" + key + "' has wrong rank");
    return GroupWord::abelian(std::move(e));
  }
  std::vector<Syllable> syl;
  std::stringstream ss(key);
  std::string item;
  while (ss >> item) {
    int gen = item[0] - 'a';
    if (gen < 0 || gen >= rank_) throw InvalidArgument("bad generator in word key '" + key + "'");
    std::int64_t e = 1;
    if (item.size() > 1) {
      if (item[1] != '^') throw InvalidArgument("bad word key '" + key + "'");
      try {
        e = std::stoll(item.substr(2));
      } catch (const std::exception&) {
        throw InvalidArgument("bad word key '" + key + "'");
      }
    }
    syl.push_back({gen, e});
  }
  return GroupWord::free(rank_, std::move(syl));
}

}  // namespace sofent
