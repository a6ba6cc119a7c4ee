#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dunmix {

/// Input violates a documented invariant (bad grid, malformed file, bad flag).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimizer produced a non-finite loss or gradient.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::ptrdiff_t iteration = -1)
      : std::runtime_error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")"
                                          : what),
        iteration_(iteration) {}

  /// Iteration index at which the failure was observed, or -1 if not applicable.
  std::ptrdiff_t iteration() const noexcept { return iteration_; }

 private:
  std::ptrdiff_t iteration_;
};

}  // namespace dunmix
