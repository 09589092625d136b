#pragma once

#include <stdexcept>
#include <string>

namespace btconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad ids, out-of-range cells, broken tree structure.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An operation was called on input that does not meet its precondition,
// e.g. an abstraction that is not a partition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace btconv
