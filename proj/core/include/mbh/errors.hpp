#pragma once

#include <stdexcept>
#include <string>

namespace mbh {

// Base of every numerical failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's domain. The CLI maps these to validation failures.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};
class EndpointSingularity : public DomainError {
 public:
  using DomainError::DomainError;
};
class SectorError : public DomainError {
 public:
  using DomainError::DomainError;
};
class RayError : public DomainError {
 public:
  using DomainError::DomainError;
};
class BranchCutError : public DomainError {
 public:
  using DomainError::DomainError;
};
class CutError : public DomainError {
 public:
  using DomainError::DomainError;
};
class AxisError : public DomainError {
 public:
  using DomainError::DomainError;
};
class DegreeTooLow : public DomainError {
 public:
  using DomainError::DomainError;
};
class NotOneCut : public DomainError {
 public:
  using DomainError::DomainError;
};

// Iterative or adaptive procedures that failed to reach their tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};
class ContourNonConvergence : public NonConvergence {
 public:
  using NonConvergence::NonConvergence;
};
class FitFailure : public NonConvergence {
 public:
  using NonConvergence::NonConvergence;
};
class SingularMoment : public NonConvergence {
 public:
  using NonConvergence::NonConvergence;
};
class PrecisionLoss : public NonConvergence {
 public:
  using NonConvergence::NonConvergence;
};

}  // namespace mbh
