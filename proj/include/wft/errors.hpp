#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wft {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller asked for something outside the supported parameter set
/// (wavelet order, malformed argument). Maps to a usage error in the CLI.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public InvalidArgument {
 public:
  explicit UnsupportedOrder(int K)
      : InvalidArgument("order not supported: K=" + std::to_string(K) +
                        " (supported orders: {1,2,3})") {}
};

class UnsupportedConfiguration : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The basis function does not have the requested number of derivatives.
class RegularityError : public Error {
 public:
  RegularityError(int K, int deriv)
      : Error("insufficient regularity: Daubechies K=" + std::to_string(K) +
              " has no derivative of order d=" + std::to_string(deriv)) {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A linear system that should determine its unknowns uniquely does not.
class DegenerateSystem : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

class NoSpectralGap : public Error {
 public:
  using Error::Error;
};

}  // namespace wft
