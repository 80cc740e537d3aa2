#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ppgate {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, missing or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be Hermitian positive semidefinite is not.
/// Carries the offending eigenvalues so callers can report them.
class NonPhysicalError : public DataError {
 public:
  NonPhysicalError(const std::string& what, std::vector<double> eigenvalues)
      : DataError(what), eigenvalues_(std::move(eigenvalues)) {}

  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<double> eigenvalues_;
};

/// A design or solve request has no admissible solution.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppgate
