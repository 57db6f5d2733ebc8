#pragma once

#include <stdexcept>
#include <string>

namespace rescoef {

/// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Two functions defined on different grids were combined.
class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error(what) {}
};

/// A coefficient value violates the positivity required of a diffusivity.
class NonPositiveCoefficient : public Error {
 public:
  explicit NonPositiveCoefficient(const std::string& what) : Error(what) {}
};

/// A parameter point outside the declared domain of a family.
class UnknownParameter : public Error {
 public:
  explicit UnknownParameter(const std::string& what) : Error(what) {}
};

/// A concentration probe whose support leaves the domain.
class ProbeOutOfDomain : public Error {
 public:
  explicit ProbeOutOfDomain(const std::string& what) : Error(what) {}
};

/// A concentration probe too narrow for the grid or mesh to resolve.
class ProbeUnresolved : public Error {
 public:
  explicit ProbeUnresolved(const std::string& what) : Error(what) {}
};

/// A probe with vanishing norm (or an empty probe set).
class DegenerateProbe : public Error {
 public:
  explicit DegenerateProbe(const std::string& what) : Error(what) {}
};

/// The simplex solver exceeded its iteration cap or lost consistency.
class NumericalBreakdown : public Error {
 public:
  explicit NumericalBreakdown(const std::string& what) : Error(what) {}
};

/// Exhaustive oracle requested for a problem too large to enumerate.
class OracleTooLarge : public Error {
 public:
  explicit OracleTooLarge(const std::string& what) : Error(what) {}
};

/// Greedy driver invoked on a family without parameters.
class EmptyFamily : public Error {
 public:
  explicit EmptyFamily(const std::string& what) : Error(what) {}
};

/// Span operation invoked with no basis functions.
class EmptyBasis : public Error {
 public:
  explicit EmptyBasis(const std::string& what) : Error(what) {}
};

/// A coefficient grid that does not refine to the mesh elements.
class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error(what) {}
};

/// Power iteration failed to converge within its cap.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// File could not be read or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// A precondition violated by the caller (invalid sizes, non-finite data).
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

}  // namespace rescoef
