#include "satreg/state_space.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace satreg {

namespace {

constexpr Eigen::Index kExactSvdLimit = 400;
constexpr double kPassivityTolerance = 1e-10;
constexpr double kFeedbackConditionLimit = 1e12;

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionMismatch(what);
}

bool is_symmetric(const Mat& m) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + m.cwiseAbs().maxCoeff());
}

template <typename MatrixT>
double lu_sigma_estimate(const MatrixT& m, const Eigen::PartialPivLU<MatrixT>& lu) {
  const double diag_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(diag_min > 0.0)) return 0.0;
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !std::isfinite(rc)) return 0.0;
  // rcond = 1 / (|M|_1 |M^-1|_1), so 1/|M^-1|_1 = rcond |M|_1.
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  return rc * norm1;
}

template <typename MatrixT>
double sigma_min_of(const MatrixT& m) {
  const auto n = m.rows();
  if (n <= kExactSvdLimit) {
    Eigen::BDCSVD<MatrixT> svd(m);
    return svd.singularValues()[n - 1];
  }
  Eigen::PartialPivLU<MatrixT> lu(m);
  return lu_sigma_estimate(m, lu);
}

// Gate on the smallest singular value, then solve m x = rhs.
template <typename MatrixT, typename RhsT>
auto gated_solve(const MatrixT& m, const RhsT& rhs, double threshold, cplx lambda, double* sigma_out) {
  Eigen::PartialPivLU<MatrixT> lu(m);
  const double sigma = m.rows() <= kExactSvdLimit ? sigma_min_of(m) : lu_sigma_estimate(m, lu);
  if (sigma_out) *sigma_out = sigma;
  if (!(sigma > threshold)) throw NearSingularResolvent(lambda, sigma, threshold);
  return lu.solve(rhs).eval();
}

double matrix_condition(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

}  // namespace

StateSpaceModel::StateSpaceModel(Mat A, Mat Bc, Mat Bd, Mat C, Mat gram)
    : A_(std::move(A)), Bc_(std::move(Bc)), Bd_(std::move(Bd)), C_(std::move(C)), gram_(std::move(gram)) {
  const auto n = A_.rows();
  require(A_.cols() == n, "state space: A must be square");
  require(Bc_.rows() == n, "state space: B_c must have n rows");
  require(Bd_.rows() == n || (Bd_.size() == 0), "state space: B_d must have n rows");
  if (Bd_.size() == 0) Bd_ = Mat::Zero(n, Bd_.cols());
  require(C_.cols() == n, "state space: C must have n columns");
  require(C_.rows() == Bc_.cols(), "state space: output and control dimensions must agree (Y = U)");
  if (gram_.size() > 0) {
    require(gram_.rows() == n && gram_.cols() == n, "state space: gram must be n x n");
    if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + gram_.cwiseAbs().maxCoeff())) {
      throw InvalidArgument("state space: gram matrix is not symmetric");
    }
    Eigen::LLT<Mat> llt(gram_);
    if (llt.info() != Eigen::Success) {
      throw InvalidArgument("state space: gram matrix is not positive definite");
    }
  }
  for (Eigen::Index k = 0; k < Bc_.cols(); ++k) input_labels.push_back("u" + std::to_string(k + 1));
  for (Eigen::Index k = 0; k < Bd_.cols(); ++k) disturbance_labels.push_back("w" + std::to_string(k + 1));
}

Mat StateSpaceModel::gram() const {
  if (gram_.size() > 0) return gram_;
  return Mat::Identity(A_.rows(), A_.rows());
}

Mat closed_loop_generator(const StateSpaceModel& model, double kappa) {
  if (kappa < 0.0) throw InvalidArgument("closed_loop_generator: kappa must be nonnegative");
  if (kappa == 0.0) return model.A();
  return model.A() - kappa * model.Bc() * model.C();
}

double resolvent_threshold(const Mat& generator) { return 1e-10 * (1.0 + generator.norm()); }

double resolvent_sigma_min(const Mat& generator, cplx lambda) {
  const auto n = generator.rows();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (lambda.imag() == 0.0) {
    return sigma_min_of(Mat(lambda.real() * Mat::Identity(n, n) - generator));
  }
  return sigma_min_of(CMat(lambda * CMat::Identity(n, n) - generator.cast<cplx>()));
}

CMat resolvent_solve(const StateSpaceModel& model, double kappa, cplx lambda, const CMat& rhs,
                     double* sigma_min_out) {
  const Mat G = closed_loop_generator(model, kappa);
  const auto n = G.rows();
  require(rhs.rows() == n, "resolvent_solve: right-hand side must have n rows");
  const double threshold = resolvent_threshold(G);

  if (lambda.imag() == 0.0) {
    const Mat m = lambda.real() * Mat::Identity(n, n) - G;
    Mat both(n, 2 * rhs.cols());
    both << rhs.real(), rhs.imag();
    const Mat x = gated_solve(m, both, threshold, lambda, sigma_min_out);
    CMat out(n, rhs.cols());
    out.real() = x.leftCols(rhs.cols());
    out.imag() = x.rightCols(rhs.cols());
    return out;
  }
  const CMat m = lambda * CMat::Identity(n, n) - G.cast<cplx>();
  return gated_solve(m, rhs, threshold, lambda, sigma_min_out);
}

namespace {

TransferValue generator_transfer(const StateSpaceModel& model, double kappa, cplx lambda) {
  const auto nu = model.inputs();
  const auto nd = model.disturbances();
  CMat rhs(model.states(), nu + nd);
  rhs.leftCols(nu) = model.Bc().cast<cplx>();
  rhs.rightCols(nd) = model.Bd().cast<cplx>();

  TransferValue tv;
  tv.lambda = lambda;
  tv.kappa = kappa;
  const CMat X = resolvent_solve(model, kappa, lambda, rhs, &tv.resolvent_sigma_min);
  const CMat P = model.C().cast<cplx>() * X;
  tv.Pc = P.leftCols(nu);
  tv.Pd = P.rightCols(nd);
  tv.resolvent_valid = true;
  return tv;
}

}  // namespace

TransferValue transfer(const StateSpaceModel& model, cplx lambda) { return generator_transfer(model, 0.0, lambda); }

TransferValue closed_loop_transfer(const StateSpaceModel& model, double kappa, cplx lambda, ClosedLoopPath path) {
  if (kappa < 0.0) throw InvalidArgument("closed_loop_transfer: kappa must be nonnegative");
  if (kappa == 0.0 || path == ClosedLoopPath::Generator) {
    return generator_transfer(model, kappa, lambda);
  }
  TransferValue open = transfer(model, lambda);
  const auto nu = model.inputs();
  const CMat loop = CMat::Identity(nu, nu) + kappa * open.Pc;
  const double cond = matrix_condition(loop);
  if (!(cond < kFeedbackConditionLimit)) {
    throw FeedbackLoopSingular("I + kappa P_c(lambda) is numerically singular at lambda = " +
                               format_complex(lambda));
  }
  Eigen::PartialPivLU<CMat> lu(loop);
  TransferValue tv = open;
  tv.kappa = kappa;
  tv.Pc = lu.solve(open.Pc);
  tv.Pd = lu.solve(open.Pd);
  return tv;
}

PassivityReport check_passivity(const StateSpaceModel& model) {
  const Mat M = model.gram();
  const Mat& A = model.A();
  const Mat& B = model.Bc();
  const Mat& C = model.C();
  const auto n = model.states();
  const auto m = model.inputs();

  Mat block = Mat::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = M * A + A.transpose() * M;
  block.topRightCorner(n, m) = M * B - C.transpose();
  block.bottomLeftCorner(m, n) = B.transpose() * M - C;
  // Symmetrize against rounding in M A + A^T M.
  block = (0.5 * (block + block.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Mat> es(block, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("check_passivity: eigensolver failed");
  PassivityReport r;
  r.worst_eigenvalue = es.eigenvalues().maxCoeff();
  r.passive = r.worst_eigenvalue <= kPassivityTolerance;
  return r;
}

double spectral_abscissa(const Mat& matrix) {
  if (matrix.rows() != matrix.cols()) throw DimensionMismatch("spectral_abscissa: matrix must be square");
  if (matrix.rows() == 0) return -std::numeric_limits<double>::infinity();
  if (is_symmetric(matrix)) {
    const Mat sym = 0.5 * (matrix + matrix.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("spectral_abscissa: eigensolver failed");
    return es.eigenvalues().maxCoeff();
  }
  Eigen::EigenSolver<Mat> es(matrix, false);
  if (es.info() != Eigen::Success) throw Error("spectral_abscissa: eigensolver failed");
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace satreg
