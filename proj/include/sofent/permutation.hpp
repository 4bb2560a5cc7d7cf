#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sofent/types.hpp"

namespace sofent {

// A bijection of {0, ..., n-1} stored as its image array.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Vertex> images);  // validates bijectivity

  static Permutation identity(std::size_t n);
  static Permutation cycle(std::size_t n);  // v -> v+1 mod n

  std::size_t size() const { return images_.size(); }
  Vertex operator()(Vertex v) const { return images_[v]; }
  std::span<const Vertex> images() const { return images_; }

  bool is_identity() const;
  Permutation inverse() const;
  Permutation pow(std::int64_t k) const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<Vertex> images_;
};

// (a * b)(v) = a(b(v)).
Permutation compose(const Permutation& a, const Permutation& b);

}  // namespace sofent
