#include "sofent/permutation.hpp"

#include <numeric>
#include <string>

#include "sofent/error.hpp"

namespace sofent {

Permutation::Permutation(std::vector<Vertex> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (Vertex v : images_) {
    if (v >= images_.size() || seen[v])
      throw InvalidArgument("permutation is not a bijection on 0.." +
                            std::to_string(images_.size()) + "-1");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(std::size_t n) {
  Permutation p;
  p.images_.resize(n);
  std::iota(p.images_.begin(), p.images_.end(), Vertex{0});
  return p;
}

Permutation Permutation::cycle(std::size_t n) {
  Permutation p;
  p.images_.resize(n);
  for (std::size_t v = 0; v < n; ++v) p.images_[v] = static_cast<Vertex>((v + 1) % n);
  return p;
}

bool Permutation::is_identity() const {
  for (std::size_t v = 0; v < images_.size(); ++v)
    if (images_[v] != v) return false;
  return true;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.images_.resize(images_.size());
  for (std::size_t v = 0; v < images_.size(); ++v) p.images_[images_[v]] = static_cast<Vertex>(v);
  return p;
}

Permutation Permutation::pow(std::int64_t k) const {
  Permutation base = k < 0 ? inverse() : *this;
  std::uint64_t n = k < 0 ? static_cast<std::uint64_t>(-k) : static_cast<std::uint64_t>(k);
  Permutation result = identity(images_.size());
  while (n > 0) {
    if (n & 1) result = compose(base, result);
    base = compose(base, base);
    n >>= 1;
  }
  return result;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw InvalidArgument("compose: size mismatch");
  std::vector<Vertex> out(a.size());
  for (std::size_t v = 0; v < a.size(); ++v) out[v] = a(b(static_cast<Vertex>(v)));
  return Permutation(std::move(out));
}

}  // namespace sofent
