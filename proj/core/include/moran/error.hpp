#pragma once

#include <stdexcept>
#include <string>

namespace moran {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or configuration value is out of range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A structural axiom (nesting, disjointness, filtration ordering) or a
/// lemma-level inequality failed on concrete data.
class AxiomViolation : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not certify its result.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace moran
