#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace satreg {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent vector or matrix sizes.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of the control design failed
/// (resolvent, invertibility, or boundary-problem gates).
class GateFailure : public Error {
 public:
  using Error::Error;
};

class NearSingularResolvent : public GateFailure {
 public:
  NearSingularResolvent(cplx lambda, double sigma_min, double threshold);
  cplx lambda() const { return lambda_; }

 private:
  cplx lambda_;
};

class FeedbackLoopSingular : public GateFailure {
 public:
  using GateFailure::GateFailure;
};

class TransmissionZero : public GateFailure {
 public:
  TransmissionZero(double omega, double condition);
  double omega() const { return omega_; }

 private:
  double omega_;
};

class ResolventFailure : public GateFailure {
 public:
  ResolventFailure(double omega, const std::string& why);
};

class DegenerateBVP : public GateFailure {
 public:
  using GateFailure::GateFailure;
};

/// Non-finite values appeared during time integration.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

std::string format_complex(cplx z);

}  // namespace satreg
