#pragma once

#include <stdexcept>
#include <string>

namespace strainreal {

/// Input text that does not conform to the field-expression grammar.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A mathematical hypothesis of a construction is violated by the input
/// (vanishing strain at the center, M + M^T = 0, incompatible laminate jump,
/// nonpositive viscosity, ...). The CLI maps this to exit code 2.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (non-contracting fixed point, bracket failure,
/// quadrature tolerance not met). The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace strainreal
