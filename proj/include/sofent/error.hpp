#pragma once

#include <stdexcept>
#include <string>

namespace sofent {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input to an operation (contract violation detectable at the call).
struct InvalidArgument : Error {
  using Error::Error;
};

// A group word was evaluated outside a sofic map's radius budget.
struct BudgetExceeded : Error {
  using Error::Error;
};

// An enumeration, ball size, or sample budget was exceeded.
struct CapExceeded : Error {
  using Error::Error;
};

struct TorsionError : Error {
  using Error::Error;
};

// A local observable's table has no entry for the requested pattern.
struct MissingPattern : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct NoFeasibleSchedule : Error {
  using Error::Error;
};

}  // namespace sofent
