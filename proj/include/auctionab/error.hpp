#pragma once

#include <stdexcept>
#include <string>

namespace auctionab {

// Base class for every failure raised by the library. `module()` names the
// component that detected the problem so the CLI can report it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Caller passed a value outside an operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A numeric evaluation hit a point where the source allocation rule is flat,
// so the requested quantity is undefined there.
class DegenerateError : public Error {
 public:
  DegenerateError(std::string module, const std::string& what, double quantile)
      : Error(std::move(module), what + " at q=" + std::to_string(quantile)),
        quantile_(quantile) {}

  double quantile() const noexcept { return quantile_; }

 private:
  double quantile_;
};

// Malformed external input (CSV, config, preset names).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace auctionab
