#pragma once

#include <stdexcept>
#include <string>

namespace nodal {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: invalid resolutions or extents, functions bound to a
/// different mesh, zero or non-sign-changing iterates where a signed one
/// is required, malformed serialized data.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Ray projection could not bracket or resolve the Nehari scaling.
class ProjectionFailure : public Error {
public:
  using Error::Error;
};

/// A sign part of the iterate collapsed below the representable floor.
class DegenerateIterate : public Error {
public:
  using Error::Error;
};

/// Spectral or index computation failed (eigensolver did not converge,
/// diagnostics requested for an unusable function).
class DiagnosticError : public Error {
public:
  using Error::Error;
};

}  // namespace nodal
