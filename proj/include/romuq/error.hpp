#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace romuq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation (non-square, length mismatch, ...).
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Input violates a documented precondition.
class ValidationError : public Error {
public:
  using Error::Error;
};

class SymmetryError : public Error {
public:
  using Error::Error;
};

class SingularMatrixError : public Error {
public:
  using Error::Error;
};

/// Least-squares design matrix is numerically rank deficient.
class ConditioningError : public Error {
public:
  ConditioningError(const std::string& what, int deficient_columns)
      : Error(what), deficient_columns_(deficient_columns) {}
  int deficient_columns() const noexcept { return deficient_columns_; }

private:
  int deficient_columns_;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

/// Fields living on different meshes (or with incompatible boundary tables).
class MeshMismatchError : public Error {
public:
  using Error::Error;
};

class DegenerateInputError : public Error {
public:
  using Error::Error;
};

/// A discretely divergence-free field turned out not to be.
class DivergenceConstraintError : public Error {
public:
  using Error::Error;
};

/// Residual blow-up in a nonlinear solve; carries the residual history.
class SolverDivergenceError : public Error {
public:
  SolverDivergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  std::vector<double> trace_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class ArtifactError : public Error {
public:
  using Error::Error;
};

} // namespace romuq
