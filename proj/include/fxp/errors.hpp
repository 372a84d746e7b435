#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fxp {

// Malformed input text (JSON syntax, bad rational literal, ...).
// Carries the byte offset into the input when one is known.
class ParseError : public std::runtime_error {
 public:
  static constexpr std::size_t kNoPosition = static_cast<std::size_t>(-1);

  explicit ParseError(const std::string& message, std::size_t position = kNoPosition)
      : std::runtime_error(position == kNoPosition
                               ? message
                               : message + " (at byte " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Structurally well-formed input that violates a model or problem invariant.
// The message names the violated invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A query with no answer, e.g. "no CXp exists".
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Work size above the configured cap (brute-force point count, SHAP lattice
// width, enumeration limit).
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fxp
