#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace adrcm {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model or operation parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed directed tree specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Exact integer count exceeded 64 bits.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Sample with zero variance where a standardization was requested.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the finite-variance regime an estimator requires.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Malformed text input (CSV, tree files).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A replicate failed; carries the seed needed to reproduce it.
class ReplicateError : public Error {
 public:
  ReplicateError(std::uint64_t seed, const std::string& what)
      : Error("replicate with seed " + std::to_string(seed) + " failed: " + what), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

// Configuration rejected; collects every problem found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "\n";
      out += item;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace adrcm
