#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace aniso {

// Precondition violated by a caller-supplied argument.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Environment rejected by validation; carries the first offending level if any.
class InvalidEnvironment : public std::invalid_argument {
 public:
  InvalidEnvironment(const std::string& what, std::optional<std::int64_t> level = std::nullopt)
      : std::invalid_argument(what), level_(level) {}
  std::optional<std::int64_t> level() const { return level_; }

 private:
  std::optional<std::int64_t> level_;
};

class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Density evaluated exactly at a support endpoint, where it diverges integrably.
class Singularity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Law collapses to a point mass (gamma1 == gamma2); no density exists.
class DegenerateLaw : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnknownTest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aniso
