#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

#include "satreg/state_space.hpp"

namespace satreg {

/// Execution policy for the data-parallel kernels. Serial is the reference
/// implementation; Parallel must reproduce it bit-for-bit.
enum class Exec { Serial, Parallel };

int max_threads();
void set_threads(int n);

/// Linear operator that acts independently on disjoint groups of state
/// indices. Groups of size one are stored as a flat diagonal.
class BlockDiagonalOperator {
 public:
  struct Block {
    std::vector<Eigen::Index> index;
    Mat matrix;
  };

  BlockDiagonalOperator() = default;
  BlockDiagonalOperator(Eigen::Index n, std::vector<Block> blocks);

  Eigen::Index size() const { return n_; }
  std::size_t block_count() const { return diag_index_.size() + blocks_.size(); }

  /// y += Op x.
  void apply_add(const Vec& x, Vec& y, Exec exec = Exec::Parallel) const;
  /// y = Op x.
  void apply(const Vec& x, Vec& y, Exec exec = Exec::Parallel) const;
  Mat dense() const;

 private:
  static constexpr std::size_t kParallelMinWork = 1 << 15;

  Eigen::Index n_ = 0;
  std::size_t work_ = 0;  // multiply-adds per apply
  std::vector<Eigen::Index> diag_index_;
  std::vector<double> diag_value_;
  std::vector<Block> blocks_;
};

/// Connected components of the sparsity graph of A (i ~ j iff A_ij or A_ji
/// is nonzero), each sorted ascending; components ordered by smallest index.
std::vector<std::vector<Eigen::Index>> coupled_blocks(const Mat& A);

/// e^{hA}, h phi_1(hA) and h phi_2(hA) for a step h, built blockwise over
/// coupled_blocks(A). Scalar and 2x2 rotation blocks use closed forms, larger
/// blocks a Van Loan augmented exponential. phi_1(z) = (e^z - 1)/z, phi_2(z) = (e^z - 1 - z)/z^2.
struct ExponentialOperators {
  BlockDiagonalOperator expA;
  BlockDiagonalOperator phi1;
  BlockDiagonalOperator phi2;
};

ExponentialOperators exponential_operators(const Mat& A, double h, Exec exec = Exec::Parallel);

/// Scalar phi functions with series evaluation near zero.
double phi1_scalar(double z);
double phi2_scalar(double z);
cplx phi1_scalar(cplx z);
cplx phi2_scalar(cplx z);

/// One transfer evaluation of a sweep. Exactly one of value / error is set.
struct SweepEntry {
  std::optional<TransferValue> value;
  std::exception_ptr error;
};

/// closed_loop_transfer at every lambda; entries are independent and each
/// failure is captured in its own entry.
std::vector<SweepEntry> transfer_sweep(const StateSpaceModel& model, double kappa,
                                       const std::vector<cplx>& lambdas, Exec exec = Exec::Parallel);

/// Rethrows the first (lowest-index) failure, otherwise returns the values.
std::vector<TransferValue> values_or_throw(const std::vector<SweepEntry>& sweep);

/// min over i in [0, count) of f(i). f must be safe to call concurrently.
double min_reduce(std::size_t count, const std::function<double(std::size_t)>& f, Exec exec = Exec::Parallel);

}  // namespace satreg
