#ifndef ERPX_ERRORS_HPP
#define ERPX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace erpx {

// A precondition or invariant was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// User-supplied data (file contents, matrices, configs) is unusable.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace erpx

#endif
