#pragma once

#include <stdexcept>
#include <string>

namespace spellnet {

// Bad input data or failed validation; the CLI maps this to exit code 2.
// Everything else (std::invalid_argument, std::logic_error, ...) is an
// internal/contract error and exits 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spellnet
