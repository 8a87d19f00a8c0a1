#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vfil {

/// Base class for all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid sizes, truncations or parameter combinations.
struct ConfigError : Error {
  using Error::Error;
};

/// The requested object does not exist for the given parameters
/// (e.g. polygon radius with kappa <= (n-1)/2).
struct InfeasibleError : Error {
  using Error::Error;
};

/// Degenerate input: coincident points, zero kernel mode, singular reduction.
struct DegenerateError : Error {
  using Error::Error;
};

/// Iteration failed to converge; carries the residual history.
struct DivergenceError : Error {
  std::vector<double> residual_history;
  DivergenceError(const std::string& what, std::vector<double> hist)
      : Error(what), residual_history(std::move(hist)) {}
};

/// Field left the analyticity disk of the nonlinearity.
struct DomainError : Error {
  using Error::Error;
};

/// Field violates the imposed reflection symmetries; carries the defect norm.
struct SymmetryError : Error {
  double defect;
  SymmetryError(const std::string& what, double d) : Error(what), defect(d) {}
};

/// Hypothesis of an a-priori estimate is not satisfied.
struct PreconditionError : Error {
  using Error::Error;
};

/// Two filaments closer than the collision guard.
struct CollisionError : Error {
  int i, j;
  double s;
  CollisionError(const std::string& what, int i_, int j_, double s_)
      : Error(what), i(i_), j(j_), s(s_) {}
};

/// |w| fell under the floor of the 1/|w|^2 nonlinearity.
struct SingularityError : Error {
  using Error::Error;
};

}  // namespace vfil
