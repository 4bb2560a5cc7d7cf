#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sofent/group.hpp"
#include "sofent/types.hpp"

namespace sofent {

// An F-local observable phi: A^G -> B given by a finite table theta: A^F -> B.
// Patterns are indexed in mixed radix |A| with window position 0 least
// significant; a negative table entry marks a missing pattern.
class LocalObservable {
 public:
  LocalObservable(std::vector<GroupWord> window, std::size_t input_alphabet,
                  std::size_t output_alphabet, std::vector<std::int64_t> table);

  // x -> x(window[index]).
  static LocalObservable projection(std::vector<GroupWord> window, std::size_t index,
                                    std::size_t alphabet);
  static LocalObservable constant(std::vector<GroupWord> window, std::size_t alphabet,
                                  Symbol value, std::size_t output_alphabet);
  // The full pattern as one output symbol; output alphabet |A|^|F|.
  static LocalObservable identity(std::vector<GroupWord> window, std::size_t alphabet);
  // XOR of all window coordinates over A = {0, 1}.
  static LocalObservable parity(std::vector<GroupWord> window);
  static LocalObservable from_function(std::vector<GroupWord> window, std::size_t input_alphabet,
                                       std::size_t output_alphabet,
                                       const std::function<Symbol(std::span<const Symbol>)>& fn);

  const std::vector<GroupWord>& window() const { return window_; }
  std::size_t input_alphabet() const { return input_alphabet_; }
  std::size_t output_alphabet() const { return output_alphabet_; }
  const std::vector<std::int64_t>& table() const { return table_; }

  std::size_t encode(std::span<const Symbol> pattern) const;
  // Throws MissingPattern when the table has no entry.
  Symbol operator()(std::span<const Symbol> pattern) const;
  Symbol at_index(std::size_t index) const;

 private:
  std::vector<GroupWord> window_;
  std::size_t input_alphabet_;
  std::size_t output_alphabet_;
  std::vector<std::int64_t> table_;
};

}  // namespace sofent
