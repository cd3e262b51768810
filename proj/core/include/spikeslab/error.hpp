#pragma once

#include <stdexcept>
#include <string>

namespace spikeslab {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Mixture form requested for a spike-and-slab with spike_prob in {0, 1}.
class DegenerateMixture : public Error {
 public:
  using Error::Error;
};

// Two components of a NonOverlappingMixture accepted the same point.
class OverlappingSupport : public Error {
 public:
  using Error::Error;
};

// q puts mass where p has none, so KL(q || p) is infinite.
class AbsoluteContinuityViolation : public Error {
 public:
  using Error::Error;
};

// A fit produced a non-finite value. `location` names the coordinate,
// e.g. "i=17" or "(p=3,k=1)".
class NumericalDivergence : public Error {
 public:
  NumericalDivergence(const std::string& what, std::string location)
      : Error(what + " at " + location), location_(std::move(location)) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class CorrelationUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace spikeslab
