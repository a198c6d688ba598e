#pragma once

#include <stdexcept>
#include <string>

namespace uavloc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition was violated by the caller.
class ContractViolationError : public Error {
public:
  explicit ContractViolationError(const std::string& what) : Error(what) {}
};

/// Evaluation point coincides with a waypoint (or distance is non-positive).
class SingularGeometryError : public Error {
public:
  explicit SingularGeometryError(const std::string& what) : Error(what) {}
};

/// Zero noise variance combined with a nonzero residual.
class DegenerateLikelihoodError : public Error {
public:
  explicit DegenerateLikelihoodError(const std::string& what) : Error(what) {}
};

/// Fusion weights cannot be formed because an information matrix is singular.
class RankDeficientFusionError : public Error {
public:
  explicit RankDeficientFusionError(const std::string& what) : Error(what) {}
};

/// Normal equations are singular and no damping was requested.
class RankDeficientSolveError : public Error {
public:
  explicit RankDeficientSolveError(const std::string& what) : Error(what) {}
};

/// Total Fisher information is (near-)singular; the CRLB is unbounded.
class UnobservableGeometryError : public Error {
public:
  explicit UnobservableGeometryError(const std::string& what) : Error(what) {}
};

/// Invalid experiment or protocol configuration.
class ConfigurationError : public Error {
public:
  explicit ConfigurationError(const std::string& what) : Error(what) {}
};

/// File read/write failure; message carries the offending path.
class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace uavloc
