#pragma once

#include <stdexcept>
#include <string>

namespace sdtol {

// Base for all contract violations raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct FrameMismatch : Error {
  using Error::Error;
};

struct MissingParameter : Error {
  using Error::Error;
};

struct DuplicateParameter : Error {
  using Error::Error;
};

// Positioning / gauge hierarchy cannot be resolved (under/over-constrained, bad data).
struct ResolutionError : Error {
  using Error::Error;
};

// Optimization-level failures: guards exceeded, ill-posed problems.
struct SolveError : Error {
  using Error::Error;
};

}  // namespace sdtol
