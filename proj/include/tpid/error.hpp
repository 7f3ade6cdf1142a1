#pragma once

#include <stdexcept>
#include <string>

namespace tpid {

// Malformed or inconsistent input data (files, corpora, key lookups). CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (shapes, counts, ranges). CLI exit code 2.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Operation invoked in the wrong state, e.g. backward() with nothing recorded.
class StateError : public ContractError {
 public:
  using ContractError::ContractError;
};

namespace detail {
[[noreturn]] inline void contract_fail(const std::string& what) { throw ContractError(what); }
inline void require(bool ok, const std::string& what) {
  if (!ok) contract_fail(what);
}
}  // namespace detail

}  // namespace tpid
