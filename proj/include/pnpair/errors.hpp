#pragma once

#include <stdexcept>
#include <string>

namespace pnpair {

// Exit codes used by the command-line front end.
enum class ExitCode : int { ok = 0, bad_input = 2, resource = 3, integrity = 4 };

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed or out-of-domain input (non-prime p, unparsable polynomial, ...).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::bad_input, what) {}
};

/// A configured budget (scan size, table size, sieve bound) would be exceeded.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ExitCode::resource, what) {}
};

/// An internal consistency check failed.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what) : Error(ExitCode::integrity, what) {}
};

class DivisionByZero : public InputError {
 public:
  DivisionByZero() : InputError("division by zero in finite field") {}
};

/// Raised when an arithmetic function needs a complete factorization but
/// the factorization still carries a composite cofactor.
class IncompleteFactorization : public Error {
 public:
  explicit IncompleteFactorization(const std::string& what)
      : Error(ExitCode::resource, "incomplete factorization: " + what) {}
};

}  // namespace pnpair
