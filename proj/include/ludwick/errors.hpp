#pragma once

#include <stdexcept>
#include <string>

namespace ludwick {

// Numerical failure discovered while computing: singular normal equations,
// unstable integration, a minimum pinned to the search bracket. Input and
// precondition problems throw std::domain_error / std::invalid_argument
// instead, so callers can map the two classes to different exit codes.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ludwick
