#ifndef METASTAB_ERRORS_HPP
#define METASTAB_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace metastab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the declared domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Malformed or unresolvable configuration; `key` is the offending path.
struct ConfigError : Error {
  std::string key;
  ConfigError(std::string key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what), key(std::move(key_path)) {}
};

// A proven invariant failed at runtime.
struct ContractViolation : Error {
  using Error::Error;
};

// Comparison undecidable within the declared slack (p != 2 path).
struct IndeterminateComparison : Error {
  using Error::Error;
};

struct FuelExceeded : Error {
  std::uint64_t applications;
  std::string stage;
  FuelExceeded(std::uint64_t used, std::string where)
      : Error("fuel exceeded after " + std::to_string(used) + " applications at " + where),
        applications(used), stage(std::move(where)) {}
};

}  // namespace metastab

#endif
