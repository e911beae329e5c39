#pragma once

#include <stdexcept>
#include <string>

namespace osclab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |Jh_eps| <= 0 somewhere: eps is outside the admissible perturbation range.
class NonPositiveJacobian : public Error {
 public:
  using Error::Error;
};

/// The right-side boundary weight 1 + dphi/dx2 sin(1/eps) went negative.
class NegativeBoundaryWeight : public Error {
 public:
  using Error::Error;
};

class InvalidMeshSize : public Error {
 public:
  using Error::Error;
};

/// The oscillation-resolving rule would need more quadrature points than allowed.
class QuadratureBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateDeflation : public Error {
 public:
  using Error::Error;
};

class BlowupDetected : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

class SingularLinearization : public Error {
 public:
  using Error::Error;
};

/// A configuration violates one of the structural hypotheses; the message
/// starts with the hypothesis tag (e.g. "hipg2").
class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string hypothesis, const std::string& detail)
      : Error(hypothesis + ": " + detail), hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

}  // namespace osclab
