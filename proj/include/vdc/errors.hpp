#pragma once

#include <stdexcept>
#include <string>

namespace vdc {

/// A numerical invariant broke (loss of positive definiteness, non-finite state).
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration input. `where` is a JSON pointer or "file:line:col".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace vdc
