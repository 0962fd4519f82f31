#pragma once

#include <stdexcept>
#include <string>

namespace tdcache {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed distribution, flow or policy description.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested hit ratio or cost cannot be reached.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Operation used outside the regime where it is defined.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Bad configuration file or command option.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tdcache
