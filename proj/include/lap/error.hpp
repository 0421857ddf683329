#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lap {

// Precondition or argument violation.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An enumeration or state budget was exceeded. `count` is the size that was
// requested (states, realizations, or a decimal big integer for the nominal
// reduction length).
class ResourceLimit : public std::runtime_error {
 public:
  ResourceLimit(const std::string& what, std::string count)
      : std::runtime_error(what), count_(std::move(count)) {}
  ResourceLimit(const std::string& what, std::uint64_t count)
      : ResourceLimit(what, std::to_string(count)) {}

  const std::string& count() const noexcept { return count_; }

 private:
  std::string count_;
};

}  // namespace lap
