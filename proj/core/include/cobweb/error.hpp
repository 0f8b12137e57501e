#pragma once

#include <stdexcept>
#include <string>

namespace cobweb {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An attribute was given a nominal value where the tree has only seen
// continuous values for it, or the reverse.
class VariantMismatchError : public Error {
 public:
  using Error::Error;
};

// A node id that does not (or no longer) exist in a tree.
class StaleReferenceError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: IDX files, model documents, CSV.
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A structural invariant did not hold. Always a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace cobweb
