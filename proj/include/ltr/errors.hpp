#pragma once

#include <stdexcept>
#include <string>

namespace ltr {

// Malformed tensor files, JSON specs and command-line values.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An element violated the positivity precondition of a coordinate transform.
class NonPositiveError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A Tucker rank target or bingo spec that does not fit the tensor shape.
class RankError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ltr
