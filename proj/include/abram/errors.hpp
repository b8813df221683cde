#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace abram {

// Invalid arguments, bad configuration, precondition violations.
class invalid_input : public std::runtime_error {
 public:
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// A chain or optimiser produced a non-finite state. Carries the step index
// at which the blow-up was detected.
class diverged_error : public std::runtime_error {
 public:
  diverged_error(const std::string& what, std::int64_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

// File-level problems: missing files, short reads, write failures.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Structured-input problems: bad magic numbers, malformed CSV cells, bad
// config keys. Messages carry the offending location.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace abram
