#ifndef CHOLCOV_ERRORS_HPP
#define CHOLCOV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cholcov {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DuplicateLocation : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class InsufficientReplicates : public Error {
 public:
  using Error::Error;
};

class ModelEvaluationError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class GeometryMismatch : public Error {
 public:
  using Error::Error;
};

class PosteriorFactorizationError : public Error {
 public:
  using Error::Error;
};

class InvalidFactor : public Error {
 public:
  using Error::Error;
};

class DenseLimitExceeded : public Error {
 public:
  using Error::Error;
};

class SingularEstimate : public Error {
 public:
  using Error::Error;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

class GibbsFactorError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cholcov

#endif  // CHOLCOV_ERRORS_HPP
