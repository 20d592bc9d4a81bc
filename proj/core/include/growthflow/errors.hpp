#pragma once

#include <stdexcept>
#include <string>

namespace growthflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BadArgument : public Error {
  public:
    using Error::Error;
};

/// A growth bound produced a non-finite value at a sample.
class InvalidFunction : public Error {
  public:
    using Error::Error;
};

class DivergentIntegral : public Error {
  public:
    using Error::Error;
};

/// No admissible convex envelope of E was found.
class EnvelopeFailure : public Error {
  public:
    using Error::Error;
};

/// The operation needs a classified growth bound of a minimum tier.
class TierRequired : public Error {
  public:
    using Error::Error;
};

class SingularPoint : public Error {
  public:
    using Error::Error;
};

class EmptyField : public Error {
  public:
    using Error::Error;
};

/// Standing hypotheses (zeta >= h, tiers of zeta/h and zeta*h, ...) do not hold.
class HypothesisViolation : public Error {
  public:
    using Error::Error;
};

/// Non-finite velocity during time stepping.
class BlowUp : public Error {
  public:
    BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

  private:
    double time_;
};

}  // namespace growthflow
