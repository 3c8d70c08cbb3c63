#pragma once

#include <stdexcept>
#include <string>

namespace adngcl {

// Bad inputs: config files, dataset files, invalid parameters.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure at run time (non-finite loss, exploded parameters).
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adngcl
