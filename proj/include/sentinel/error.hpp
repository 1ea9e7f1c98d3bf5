#pragma once

#include <stdexcept>
#include <string>

namespace sentinel {

// Bad input data: unreadable files, schema mismatches, failed preconditions on
// data. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller misuse of an API (bad arguments, empty samples, incompatible shapes).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sentinel
