#pragma once

#include <stdexcept>
#include <string>

namespace cms {

// Thrown when an input violates the documented contract of a name, space or
// function object (for example a set name whose covers are inconsistent).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bounded search ran out of levels or budget before it could decide.
class SearchExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A truncated construction produced an empty cover: either the denoted set is
// empty or the truncation depth was too small to tell.
class EmptyResult : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace cms
