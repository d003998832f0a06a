#pragma once

#include <stdexcept>
#include <string>

namespace allpay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain on which a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented invariant of an input object does not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A numerical solver could not produce a result.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid contest configuration (bad file, unknown key, rejected family member).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace allpay
