#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tcsel {

// Invalid configuration or arguments supplied by the caller.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a domain invariant (dangling impact, empty corpus, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed (SVD non-convergence, rank deficiency).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics collected while processing inputs.
class Warnings {
 public:
  void add(std::string message) { messages_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const { return messages_; }
  bool empty() const { return messages_.empty(); }

 private:
  std::vector<std::string> messages_;
};

}  // namespace tcsel
