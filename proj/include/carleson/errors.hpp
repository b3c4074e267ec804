#pragma once

#include <stdexcept>
#include <string>

namespace carleson {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain (point outside the unit
/// cube, unknown node, empty point set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An atom sits below the deepest top layer the tree can represent.
class DepthError : public Error {
 public:
  using Error::Error;
};

/// The caller broke a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant failed. Always a bug in this library.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A statement the construction guarantees (a witness, a partition identity)
/// was found false on a concrete instance.
class TheoremViolation : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle was asked to run beyond its node cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. The message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace carleson
