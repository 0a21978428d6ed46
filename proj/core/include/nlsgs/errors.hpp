#pragma once

#include <stdexcept>
#include <string>

namespace nlsgs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed user input (bad polygon, out-of-range exponent, ...).
class InvalidInput : public Error
{
public:
  using Error::Error;
};

/// Raised when an iterative or nonlinear solver fails to deliver a result.
class SolverFailure : public Error
{
public:
  using Error::Error;
};

class NonSimplePolygon : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class DegenerateAngle : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class DegenerateTriangle : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class VertexNotInMesh : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class DimensionMismatch : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class ZeroMass : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class ZeroField : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class NonPositiveLambda : public InvalidInput
{
public:
  using InvalidInput::InvalidInput;
};

class SingularSystem : public SolverFailure
{
public:
  using SolverFailure::SolverFailure;
};

class NoConvergence : public SolverFailure
{
public:
  NoConvergence(const std::string &what, int iterations, double last_residual)
    : SolverFailure(what), iterations_(iterations), last_residual_(last_residual)
  {
  }
  int iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

private:
  int iterations_;
  double last_residual_;
};

class LinearSolveFailed : public SolverFailure
{
public:
  using SolverFailure::SolverFailure;
};

class BisectionFailed : public SolverFailure
{
public:
  using SolverFailure::SolverFailure;
};

class NoStartConverged : public SolverFailure
{
public:
  using SolverFailure::SolverFailure;
};

}  // namespace nlsgs
