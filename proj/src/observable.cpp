#include "sofent/observable.hpp"

#include <string>

#include "sofent/error.hpp"

namespace sofent {

namespace {

std::size_t pattern_count(std::size_t alphabet, std::size_t length) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (n > (std::size_t{1} << 26) / alphabet)
      throw CapExceeded("observable table for |A|^|F| patterns is too large");
    n *= alphabet;
  }
  return n;
}

std::vector<Symbol> decode(std::size_t index, std::size_t alphabet, std::size_t length) {
  std::vector<Symbol> out(length);
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = static_cast<Symbol>(index % alphabet);
    index /= alphabet;
  }
  return out;
}

}  // namespace

LocalObservable::LocalObservable(std::vector<GroupWord> window, std::size_t input_alphabet,
                                 std::size_t output_alphabet, std::vector<std::int64_t> table)
    : window_(std::move(window)),
      input_alphabet_(input_alphabet),
      output_alphabet_(output_alphabet),
      table_(std::move(table)) {
  if (window_.empty()) throw InvalidArgument("observable window must be nonempty");
  if (input_alphabet_ < 1 || output_alphabet_ < 1)
    throw InvalidArgument("observable alphabets must be nonempty");
  if (table_.size() != pattern_count(input_alphabet_, window_.size()))
    throw InvalidArgument("observable table size must be |A|^|F|");
  for (auto v : table_)
    if (v >= static_cast<std::int64_t>(output_alphabet_))
      throw InvalidArgument("observable table value outside output alphabet");
}

LocalObservable LocalObservable::projection(std::vector<GroupWord> window, std::size_t index,
                                            std::size_t alphabet) {
  if (index >= window.size()) throw InvalidArgument("projection index outside window");
  return from_function(std::move(window), alphabet, alphabet,
                       [index](std::span<const Symbol> x) { return x[index]; });
}

LocalObservable LocalObservable::constant(std::vector<GroupWord> window, std::size_t alphabet,
                                          Symbol value, std::size_t output_alphabet) {
  return from_function(std::move(window), alphabet, output_alphabet,
                       [value](std::span<const Symbol>) { return value; });
}

LocalObservable LocalObservable::identity(std::vector<GroupWord> window, std::size_t alphabet) {
  std::size_t n = pattern_count(alphabet, window.size());
  std::vector<std::int64_t> table(n);
  for (std::size_t i = 0; i < n; ++i) table[i] = static_cast<std::int64_t>(i);
  return LocalObservable(std::move(window), alphabet, n, std::move(table));
}

LocalObservable LocalObservable::parity(std::vector<GroupWord> window) {
  return from_function(std::move(window), 2, 2, [](std::span<const Symbol> x) {
    Symbol s = 0;
    for (Symbol v : x) s ^= v;
    return s;
  });
}

LocalObservable LocalObservable::from_function(
    std::vector<GroupWord> window, std::size_t input_alphabet, std::size_t output_alphabet,
    const std::function<Symbol(std::span<const Symbol>)>& fn) {
  std::size_t n = pattern_count(input_alphabet, window.size());
  std::vector<std::int64_t> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto pattern = decode(i, input_alphabet, window.size());
    table[i] = static_cast<std::int64_t>(fn(pattern));
  }
  return LocalObservable(std::move(window), input_alphabet, output_alphabet, std::move(table));
}

std::size_t LocalObservable::encode(std::span<const Symbol> pattern) const {
  if (pattern.size() != window_.size()) throw InvalidArgument("pattern length != window size");
  std::size_t index = 0;
  for (std::size_t i = pattern.size(); i-- > 0;) {
    if (pattern[i] >= input_alphabet_) throw InvalidArgument("pattern symbol outside alphabet");
    index = index * input_alphabet_ + pattern[i];
  }
  return index;
}

Symbol LocalObservable::at_index(std::size_t index) const {
  std::int64_t v = table_.at(index);
  if (v < 0) throw MissingPattern("observable table has no entry for pattern " + std::to_string(index));
  return static_cast<Symbol>(v);
}

Symbol LocalObservable::operator()(std::span<const Symbol> pattern) const {
  return at_index(encode(pattern));
}

}  // namespace sofent
