#pragma once

#include <stdexcept>
#include <string>

namespace gembed {

/// Bad input: malformed configuration, violated precondition, unsupported
/// combination of options. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not produce a finite, trustworthy value.
/// The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class GeometryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class StructureError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A couple whose true dissimilarity sits exactly on the label threshold.
class DegenerateThresholdError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ModeMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OptimizerError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gembed
