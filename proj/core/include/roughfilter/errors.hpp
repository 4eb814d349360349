#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rf {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: dimension mismatch, out-of-range parameter, malformed file.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure aborted (non-finite state, degenerate weights).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  explicit NumericalError(const std::string& what) : Error(what) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_ = 0;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace rf
