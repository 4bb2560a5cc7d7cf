#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sofent/error.hpp"
#include "sofent/measures.hpp"

namespace sofent {

Matrix Matrix::identity(std::size_t k) {
  Matrix m{k, std::vector<double>(k * k, 0.0)};
  for (std::size_t i = 0; i < k; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.k != y.k) throw InvalidArgument("matrix size mismatch");
  Matrix out{x.k, std::vector<double>(x.k * x.k, 0.0)};
  for (std::size_t i = 0; i < x.k; ++i)
    for (std::size_t l = 0; l < x.k; ++l) {
      double a = x(i, l);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < x.k; ++j) out(i, j) += a * y(l, j);
    }
  return out;
}

Matrix matrix_power(const Matrix& m, std::uint64_t e) {
  Matrix result = Matrix::identity(m.k);
  Matrix base = m;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

std::vector<double> row_times(std::span<const double> v, const Matrix& m) {
  if (v.size() != m.k) throw InvalidArgument("vector/matrix size mismatch");
  std::vector<double> out(m.k, 0.0);
  for (std::size_t i = 0; i < m.k; ++i)
    if (v[i] != 0.0)
      for (std::size_t j = 0; j < m.k; ++j) out[j] += v[i] * m(i, j);
  return out;
}

MarkovLaw MarkovLaw::path(std::vector<double> initial, Matrix transition, std::size_t length) {
  MarkovLaw law{std::move(initial), std::move(transition), {}};
  law.offsets.resize(length);
  for (std::size_t i = 0; i < length; ++i) law.offsets[i] = i;
  law.validate();
  return law;
}

void MarkovLaw::validate() const {
  const std::size_t k = transition.k;
  if (k == 0 || transition.a.size() != k * k) throw InvalidArgument("transition matrix is not square");
  if (initial.size() != k) throw InvalidArgument("initial distribution has wrong size");
  double total = 0.0;
  for (double p : initial) {
    if (!(p >= 0.0)) throw InvalidArgument("initial distribution has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTol) throw InvalidArgument("initial distribution does not sum to 1");
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (double p : transition.row(i)) {
      if (!(p >= 0.0)) throw InvalidArgument("transition matrix has a negative entry");
      row += p;
    }
    if (std::abs(row - 1.0) > kProbTol)
      throw InvalidArgument("transition row " + std::to_string(i) + " does not sum to 1");
  }
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] <= offsets[i - 1]) throw InvalidArgument("Markov offsets must increase");
}

MarkovLaw MarkovLaw::select(std::span<const std::size_t> positions) const {
  MarkovLaw out{initial, transition, {}};
  for (std::size_t p : positions) {
    if (p >= offsets.size()) throw InvalidArgument("Markov position out of range");
    out.offsets.push_back(offsets[p]);
  }
  for (std::size_t i = 1; i < out.offsets.size(); ++i)
    if (out.offsets[i] <= out.offsets[i - 1])
      throw InvalidArgument("Markov positions must be increasing");
  return out;
}

namespace {

// Matrix powers keyed by exponent, local to one computation.
class PowerCache {
 public:
  explicit PowerCache(const Matrix& m) : m_(m) {}
  const Matrix& get(std::size_t e) {
    auto it = cache_.find(e);
    if (it == cache_.end()) it = cache_.emplace(e, matrix_power(m_, e)).first;
    return it->second;
  }

 private:
  const Matrix& m_;
  std::map<std::size_t, Matrix> cache_;
};

}  // namespace

double entropy(const MarkovLaw& law) {
  if (law.offsets.empty()) return 0.0;
  PowerCache powers(law.transition);
  std::vector<double> dist = row_times(law.initial, powers.get(law.offsets[0]));
  double h = entropy(dist);
  for (std::size_t j = 1; j < law.offsets.size(); ++j) {
    const Matrix& q = powers.get(law.offsets[j] - law.offsets[j - 1]);
    for (std::size_t a = 0; a < q.k; ++a)
      if (dist[a] > 0.0) h += dist[a] * entropy(q.row(a));
    dist = row_times(dist, q);
  }
  return h;
}

ExplicitMeasure to_explicit(const MarkovLaw& law, std::size_t cap) {
  const std::size_t m = law.offsets.size();
  std::vector<Vertex> sites(m);
  for (std::size_t i = 0; i < m; ++i) sites[i] = static_cast<Vertex>(i);
  if (m == 0) return ExplicitMeasure::point_mass(law.alphabet(), {}, {});
  PowerCache powers(law.transition);
  std::vector<double> first = row_times(law.initial, powers.get(law.offsets[0]));
  std::vector<const Matrix*> steps;
  for (std::size_t j = 1; j < m; ++j) steps.push_back(&powers.get(law.offsets[j] - law.offsets[j - 1]));

  std::vector<std::pair<Config, double>> atoms;
  Config cur(m);
  // Depth-first over positions, pruning zero-probability prefixes.
  auto recurse = [&](auto&& self, std::size_t pos, double p) -> void {
    if (pos == m) {
      if (atoms.size() >= cap) throw CapExceeded("Markov enumeration exceeds cap " + std::to_string(cap));
      atoms.emplace_back(cur, p);
      return;
    }
    for (std::size_t a = 0; a < law.alphabet(); ++a) {
      double q = pos == 0 ? first[a] : (*steps[pos - 1])(cur[pos - 1], a);
      if (q <= 0.0) continue;
      cur[pos] = static_cast<Symbol>(a);
      self(self, pos + 1, p * q);
    }
  };
  recurse(recurse, 0, 1.0);
  return ExplicitMeasure(law.alphabet(), std::move(sites), std::move(atoms));
}

ExplicitMeasure markov_subset_marginal(const MarkovLaw& law, std::span<const std::size_t> I,
                                       std::size_t cap) {
  std::vector<std::size_t> positions(I.begin(), I.end());
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  double raw = std::pow(static_cast<double>(law.alphabet()), static_cast<double>(positions.size()));
  if (raw > static_cast<double>(cap))
    throw CapExceeded("A^I has more than " + std::to_string(cap) + " configurations");
  ExplicitMeasure sub = to_explicit(law.select(positions), cap);
  std::vector<Vertex> sites(positions.begin(), positions.end());
  std::vector<std::pair<Config, double>> atoms = sub.atoms();
  return ExplicitMeasure(law.alphabet(), std::move(sites), std::move(atoms));
}

}  // namespace sofent
