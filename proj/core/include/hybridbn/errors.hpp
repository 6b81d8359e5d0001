#pragma once

#include <stdexcept>
#include <string>

namespace hbn {

// Input text could not be parsed; `where` names the line or field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// A weighted-sample computation lost all its mass (all weights zero,
// impossible evidence, ...).
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation was refused because it would exceed hard resource limits
// (state space too large for enumeration, ...).
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hbn
