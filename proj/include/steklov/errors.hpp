#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or self-intersecting geometry (non-simple polygons, boundaries
/// that touch, a Gamma not strictly inside S, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The mesher failed structurally (lost constraint, broken topology).
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Refinement stopped before reaching the requested angle bound.
class MeshQualityError : public Error {
 public:
  MeshQualityError(const std::string& msg, double achieved_min_angle_deg)
      : Error(msg), achieved_min_angle_deg(achieved_min_angle_deg) {}
  double achieved_min_angle_deg;
};

/// validate_mesh found invariant violations; all of them are listed.
class MeshValidationError : public Error {
 public:
  MeshValidationError(const std::string& msg, std::vector<std::string> violations)
      : Error(msg), violations(std::move(violations)) {}
  std::vector<std::string> violations;
};

/// Element-level assembly failure (degenerate triangle, empty boundary tag).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not converge; carries the residual history.
class SolverError : public Error {
 public:
  SolverError(const std::string& msg, std::vector<double> residual_history)
      : Error(msg), residual_history(std::move(residual_history)) {}
  std::vector<double> residual_history;
};

/// Dense eigensolver failed to converge within the sweep budget.
class EigenSolverError : public Error {
 public:
  using Error::Error;
};

/// A matrix does not have the required property (not SPD, mismatched sizes).
class MatrixError : public Error {
 public:
  using Error::Error;
};

/// A documented operation precondition does not hold for the given data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Singular system requested (pure-Neumann interior problem at lambda = 0).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Config file parse failure; names the offending key and line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::string key, int line)
      : Error(msg), key(std::move(key)), line(line) {}
  std::string key;
  int line;
};

}  // namespace steklov
