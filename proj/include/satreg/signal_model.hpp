#pragma once

#include <vector>

#include "satreg/types.hpp"

namespace satreg {

/// Coefficients of one frequency in
///   y_ref(t) = a_0 + sum_k a_k cos(w_k t) + b_k sin(w_k t)
///   w_d(t)   = c_0 + sum_k c_k cos(w_k t) + d_k sin(w_k t).
struct Harmonic {
  double omega = 0.0;
  CVec a, b;  // output space U
  CVec c, d;  // disturbance space U_d
};

struct SignalSpec {
  CVec a0;  // dim U
  CVec c0;  // dim U_d
  std::vector<Harmonic> harmonics;

  Eigen::Index output_dim() const { return a0.size(); }
  Eigen::Index disturbance_dim() const { return c0.size(); }
  bool has_constant_part() const;
  bool is_real() const;
  double min_omega() const;
  double max_omega() const;
  std::vector<double> omegas() const;

  /// Throws InvalidArgument on non-positive or repeated (within 1e-12)
  /// frequencies, DimensionMismatch on inconsistent coefficient sizes.
  void validate() const;

  /// All-zero signals with the given dimensions and frequencies.
  static SignalSpec zeros(Eigen::Index output_dim, Eigen::Index disturbance_dim,
                          const std::vector<double>& omegas = {});
  /// Copy with every coefficient multiplied by s.
  SignalSpec scaled(double s) const;
};

CVec eval_reference(const SignalSpec& spec, double t);
CVec eval_disturbance(const SignalSpec& spec, double t);

/// Finite-dimensional signal generator v' = A_exo v, w_d = E v, y_ref = F v.
struct Exosystem {
  Mat A_exo;  // real skew-symmetric, block diagonal
  CMat E;     // dim U_d x dim v
  CMat F;     // dim U x dim v
  Vec v0;
  bool has_constant_block = true;
  std::vector<double> omegas;

  Eigen::Index dim() const { return v0.size(); }
  /// Offset of the 2x2 block of harmonic k inside v.
  Eigen::Index block_offset(std::size_t k) const { return (has_constant_block ? 1 : 0) + 2 * Eigen::Index(k); }
};

/// The constant block is dropped iff a_0 = 0 and c_0 = 0 exactly.
Exosystem build_exosystem(const SignalSpec& spec);

/// e^{A_exo t} v0 evaluated in closed form: (1, cos w1 t, -sin w1 t, ...).
Vec exo_state(const Exosystem& exo, double t);

}  // namespace satreg
