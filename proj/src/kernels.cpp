#include "satreg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace satreg {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

BlockDiagonalOperator::BlockDiagonalOperator(Eigen::Index n, std::vector<Block> blocks) : n_(n) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (auto& b : blocks) {
    const auto k = static_cast<Eigen::Index>(b.index.size());
    if (b.matrix.rows() != k || b.matrix.cols() != k) {
      throw DimensionMismatch("BlockDiagonalOperator: block matrix does not match its index set");
    }
    for (auto i : b.index) {
      if (i < 0 || i >= n || seen[i]) throw InvalidArgument("BlockDiagonalOperator: index sets must partition 0..n-1");
      seen[i] = 1;
    }
    work_ += static_cast<std::size_t>(k * k);
    if (k == 1) {
      diag_index_.push_back(b.index[0]);
      diag_value_.push_back(b.matrix(0, 0));
    } else if (k > 1) {
      blocks_.push_back(std::move(b));
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw InvalidArgument("BlockDiagonalOperator: index sets must cover 0..n-1");
  }
}

void BlockDiagonalOperator::apply_add(const Vec& x, Vec& y, Exec exec) const {
  if (x.size() != n_ || y.size() != n_) throw DimensionMismatch("BlockDiagonalOperator: vector size mismatch");
  const auto nd = static_cast<std::ptrdiff_t>(diag_index_.size());
  const auto nb = static_cast<std::ptrdiff_t>(blocks_.size());
  const double* xv = x.data();
  double* yv = y.data();

  // Each output entry is owned by exactly one iteration, with the same
  // arithmetic in both paths.
  auto block_kernel = [&](std::ptrdiff_t b) {
    const Block& blk = blocks_[static_cast<std::size_t>(b)];
    const auto k = static_cast<Eigen::Index>(blk.index.size());
    for (Eigen::Index r = 0; r < k; ++r) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) acc += blk.matrix(r, c) * xv[blk.index[c]];
      yv[blk.index[r]] += acc;
    }
  };

  // small operators are not worth a thread team
  if (exec == Exec::Serial || work_ < kParallelMinWork) {
    for (std::ptrdiff_t i = 0; i < nd; ++i) yv[diag_index_[i]] += diag_value_[i] * xv[diag_index_[i]];
    for (std::ptrdiff_t b = 0; b < nb; ++b) block_kernel(b);
    return;
  }
#pragma omp parallel
  {
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < nd; ++i) yv[diag_index_[i]] += diag_value_[i] * xv[diag_index_[i]];
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) block_kernel(b);
  }
}

void BlockDiagonalOperator::apply(const Vec& x, Vec& y, Exec exec) const {
  y.setZero(n_);
  apply_add(x, y, exec);
}

Mat BlockDiagonalOperator::dense() const {
  Mat m = Mat::Zero(n_, n_);
  for (std::size_t i = 0; i < diag_index_.size(); ++i) m(diag_index_[i], diag_index_[i]) = diag_value_[i];
  for (const auto& b : blocks_) {
    for (std::size_t r = 0; r < b.index.size(); ++r)
      for (std::size_t c = 0; c < b.index.size(); ++c) m(b.index[r], b.index[c]) = b.matrix(r, c);
  }
  return m;
}

std::vector<std::vector<Eigen::Index>> coupled_blocks(const Mat& A) {
  const auto n = A.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && A(i, j) != 0.0) {
        const auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

namespace {

cplx expm1_complex(cplx z) {
  const double s = std::sin(0.5 * z.imag());
  return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

double expm1_any(double z) { return std::expm1(z); }
cplx expm1_any(cplx z) { return expm1_complex(z); }

template <class T>
T phi1_impl(T z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return expm1_any(z) / z;
}

template <class T>
T phi2_impl(T z) {
  if (std::abs(z) < 0.5) {
    // sum_k z^k / (k+2)!
    T term = 0.5, sum = 0.5;
    for (int k = 1; k < 40; ++k) {
      term *= z / double(k + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (expm1_any(z) - z) / (z * z);
}

// f(alpha I + a J) for J = [[0, -1], [1, 0]] is the 2x2 real form of f(alpha + i a).
Mat rotation_form(cplx w) {
  Mat m(2, 2);
  m << w.real(), -w.imag(), w.imag(), w.real();
  return m;
}

}  // namespace

double phi1_scalar(double z) { return phi1_impl(z); }
double phi2_scalar(double z) { return phi2_impl(z); }
cplx phi1_scalar(cplx z) { return phi1_impl(z); }
cplx phi2_scalar(cplx z) { return phi2_impl(z); }

ExponentialOperators exponential_operators(const Mat& A, double h, Exec exec) {
  if (A.rows() != A.cols()) throw DimensionMismatch("exponential_operators: A must be square");
  if (!(h > 0.0)) throw InvalidArgument("exponential_operators: step must be positive");
  const auto groups = coupled_blocks(A);
  const auto ng = static_cast<std::ptrdiff_t>(groups.size());
  std::vector<BlockDiagonalOperator::Block> e(groups.size()), p1(groups.size()), p2(groups.size());

  auto build = [&](std::ptrdiff_t g) {
    const auto& idx = groups[static_cast<std::size_t>(g)];
    const auto k = static_cast<Eigen::Index>(idx.size());
    Mat blk(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) blk(r, c) = A(idx[r], idx[c]);
    Mat ek(k, k), p1k(k, k), p2k(k, k);
    if (k == 1) {
      const double z = h * blk(0, 0);
      ek(0, 0) = std::exp(z);
      p1k(0, 0) = h * phi1_scalar(z);
      p2k(0, 0) = h * phi2_scalar(z);
    } else if (k == 2 && blk(0, 0) == blk(1, 1) && blk(0, 1) == -blk(1, 0)) {
      const cplx z = h * cplx(blk(0, 0), blk(1, 0));
      ek = rotation_form(std::exp(z));
      p1k = h * rotation_form(phi1_scalar(z));
      p2k = h * rotation_form(phi2_scalar(z));
    } else {
      // Van Loan: exp([[hA, I, 0], [0, 0, I], [0, 0, 0]]) has top row
      // [e^{hA}, phi_1(hA), phi_2(hA)].
      Mat aug = Mat::Zero(3 * k, 3 * k);
      aug.topLeftCorner(k, k) = h * blk;
      aug.block(0, k, k, k).setIdentity();
      aug.block(k, 2 * k, k, k).setIdentity();
      const Mat ex = aug.exp();
      ek = ex.topLeftCorner(k, k);
      p1k = h * ex.block(0, k, k, k);
      p2k = h * ex.block(0, 2 * k, k, k);
    }
    const auto s = static_cast<std::size_t>(g);
    e[s] = {idx, ek};
    p1[s] = {idx, p1k};
    p2[s] = {idx, p2k};
  };

  if (exec == Exec::Serial) {
    for (std::ptrdiff_t g = 0; g < ng; ++g) build(g);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t g = 0; g < ng; ++g) build(g);
  }
  const auto n = A.rows();
  return {BlockDiagonalOperator(n, std::move(e)), BlockDiagonalOperator(n, std::move(p1)),
          BlockDiagonalOperator(n, std::move(p2))};
}

std::vector<SweepEntry> transfer_sweep(const StateSpaceModel& model, double kappa, const std::vector<cplx>& lambdas,
                                       Exec exec) {
  std::vector<SweepEntry> out(lambdas.size());
  const auto count = static_cast<std::ptrdiff_t>(lambdas.size());
  auto one = [&](std::ptrdiff_t i) {
    auto& slot = out[static_cast<std::size_t>(i)];
    try {
      slot.value = closed_loop_transfer(model, kappa, lambdas[static_cast<std::size_t>(i)]);
    } catch (...) {
      slot.error = std::current_exception();
    }
  };
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  }
  return out;
}

std::vector<TransferValue> values_or_throw(const std::vector<SweepEntry>& sweep) {
  std::vector<TransferValue> v;
  v.reserve(sweep.size());
  for (const auto& e : sweep) {
    if (e.error) std::rethrow_exception(e.error);
    v.push_back(*e.value);
  }
  return v;
}

double min_reduce(std::size_t count, const std::function<double(std::size_t)>& f, Exec exec) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) best = std::min(best, f(static_cast<std::size_t>(i)));
    return best;
  }
#pragma omp parallel for schedule(static) reduction(min : best)
  for (std::ptrdiff_t i = 0; i < n; ++i) best = std::min(best, f(static_cast<std::size_t>(i)));
  return best;
}

}  // namespace satreg
