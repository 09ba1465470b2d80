#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satreg/types.hpp"

namespace satreg {

/// Finite-dimensional realization
///   x' = A x + B_c u + B_d w,   y = C x
/// with feedthrough fixed at zero and an energy inner product <x, z> = z* M x.
class StateSpaceModel {
 public:
  StateSpaceModel() = default;
  /// Throws DimensionMismatch on inconsistent sizes and InvalidArgument when
  /// the gram matrix is not symmetric positive definite. An empty gram means
  /// identity.
  StateSpaceModel(Mat A, Mat Bc, Mat Bd, Mat C, Mat gram = Mat());

  Eigen::Index states() const { return A_.rows(); }
  Eigen::Index inputs() const { return Bc_.cols(); }
  Eigen::Index disturbances() const { return Bd_.cols(); }

  const Mat& A() const { return A_; }
  const Mat& Bc() const { return Bc_; }
  const Mat& Bd() const { return Bd_; }
  const Mat& C() const { return C_; }
  /// Identity when no weight was supplied.
  Mat gram() const;
  bool has_gram() const { return gram_.size() > 0; }

  std::vector<std::string> input_labels;
  std::vector<std::string> disturbance_labels;

 private:
  Mat A_, Bc_, Bd_, C_, gram_;
};

/// P(lambda) = [P_c, P_d], optionally under output feedback u = -kappa y + u~.
struct TransferValue {
  cplx lambda;
  double kappa = 0.0;
  CMat Pc;  // inputs x inputs
  CMat Pd;  // inputs x disturbances
  /// Smallest singular value (or its estimate for large models) of lambda - A^kappa.
  double resolvent_sigma_min = 0.0;
  bool resolvent_valid = false;
};

enum class ClosedLoopPath {
  /// Solve with A^kappa = A - kappa B_c C directly.
  Generator,
  /// (I + kappa P_c(lambda))^{-1} [P_c, P_d] from open-loop values.
  FeedbackIdentity,
};

/// A^kappa = A - kappa B_c C.
Mat closed_loop_generator(const StateSpaceModel& model, double kappa);

/// Threshold below which lambda - A is treated as singular:
/// 1e-10 * (1 + |A|_F).
double resolvent_threshold(const Mat& generator);

/// Smallest singular value of lambda - G. Exact (SVD) up to 400 states,
/// LU-based 1-norm condition estimate above that.
double resolvent_sigma_min(const Mat& generator, cplx lambda);

/// X = (lambda - A^kappa)^{-1} rhs. Throws NearSingularResolvent when the
/// gate fails. Real lambda on real data stays in real arithmetic.
CMat resolvent_solve(const StateSpaceModel& model, double kappa, cplx lambda, const CMat& rhs,
                     double* sigma_min_out = nullptr);

TransferValue transfer(const StateSpaceModel& model, cplx lambda);

TransferValue closed_loop_transfer(const StateSpaceModel& model, double kappa, cplx lambda,
                                   ClosedLoopPath path = ClosedLoopPath::Generator);

struct PassivityReport {
  bool passive = false;
  double worst_eigenvalue = 0.0;
};

/// Passive iff [[M A + A^T M, M B_c - C^T], [B_c^T M - C, 0]] has largest
/// eigenvalue <= 1e-10, i.e. Re<Ax + B_c u, x>_M <= Re<u, Cx> for all x, u.
PassivityReport check_passivity(const StateSpaceModel& model);

/// max Re(eig(matrix)); symmetric input uses the self-adjoint solver.
double spectral_abscissa(const Mat& matrix);

}  // namespace satreg
