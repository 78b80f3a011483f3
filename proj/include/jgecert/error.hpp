#pragma once

#include <stdexcept>
#include <string>

namespace jgecert {

// Shape disagreement between operands (mismatched dims, factor column counts, ...).
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// An argument is outside the operation's domain (R = 0, zero tensor, ...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Numerical precondition failed; the message carries the measured quantities.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed tensor / factor / matrix file.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace jgecert
