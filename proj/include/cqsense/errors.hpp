#ifndef CQSENSE_ERRORS_HPP
#define CQSENSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cqsense {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The covariance matrix violates symmetry or the uncertainty relation.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class NoSteadyStateError : public Error {
 public:
  using Error::Error;
};

/// Purity is one but its derivative is not negligible: the Gaussian QFI
/// formula has no finite limit there.
class PureStateSingularityError : public Error {
 public:
  using Error::Error;
};

/// Photon budget or feasibility constraint violated.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

class SearchError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or an indefinite matrix where a positive one is needed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class AccuracyError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int suggested_dim)
      : Error(what), suggested_dim_(suggested_dim) {}
  int suggested_dim() const noexcept { return suggested_dim_; }

 private:
  int suggested_dim_;
};

class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

/// Zero photon-number variance in the signal-to-noise ratio.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace cqsense

#endif  // CQSENSE_ERRORS_HPP
