#pragma once

#include <stdexcept>
#include <string>

namespace scholmig {

/// Input data violates a contract (malformed rows, inconsistent files,
/// missing subject annotations). Callers map this to a data-error exit.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A corpus file does not follow the expected schema, or too many of its
/// rows are malformed to trust the rest.
class SchemaMismatch : public DataError {
 public:
  using DataError::DataError;
};

/// A file could not be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scholmig
