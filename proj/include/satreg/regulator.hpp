#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "satreg/kernels.hpp"
#include "satreg/saturation.hpp"
#include "satreg/signal_model.hpp"
#include "satreg/state_space.hpp"

namespace satreg {

/// Feedforward
///   u_reg(t) = f0 + 1/2 sum_k [(f_k + g_k) cos(w_k t) + i (f_k - g_k) sin(w_k t)].
struct RegulatorCoefficients {
  CVec f0;
  std::vector<double> omegas;
  std::vector<CVec> f;
  std::vector<CVec> g;
  double kappa = 0.0;

  Eigen::Index dim() const { return f0.size(); }
  /// Copy with every coefficient multiplied by s.
  RegulatorCoefficients scaled(double s) const;
};

/// Steady-state plan: x_ss(t) = Pi v(t), u_ss(t) = Gamma v(t), in the real
/// exosystem coordinates.
struct RegulatorSolution {
  CMat Pi;
  CMat Gamma;
};

/// Condition-number limit for P_c^kappa at the exosystem frequencies.
inline constexpr double kTransmissionConditionLimit = 1e12;

/// Closed-loop transfer values at the exosystem eigenvalues, gated.
struct ExoFrequencyResponse {
  cplx lambda;
  double omega;  // |Im lambda|, 0 for the constant block
  CMat Pc;
  CMat Pd;
};

/// Values at 0 (if include_zero), then +i w_k, -i w_k for each k. The -i w_k
/// values are conjugates of the +i w_k ones (real models). Throws
/// ResolventFailure for the zero-frequency gate, TransmissionZero when
/// P_c^kappa(+-i w_k) has condition number >= 1e12, NearSingularResolvent
/// when +-i w_k is (numerically) an eigenvalue of A^kappa.
std::vector<ExoFrequencyResponse> exo_frequency_response(const StateSpaceModel& model, double kappa,
                                                         const std::vector<double>& omegas, bool include_zero,
                                                         Exec exec = Exec::Parallel);

RegulatorCoefficients compute_coefficients(const StateSpaceModel& model, double kappa, const SignalSpec& spec,
                                           Exec exec = Exec::Parallel);

CVec eval_ureg_complex(const RegulatorCoefficients& coeffs, double t);
/// Real part of u_reg(t).
Vec eval_ureg(const RegulatorCoefficients& coeffs, double t);

RegulatorSolution solve_regulator_equations(const StateSpaceModel& model, double kappa, const Exosystem& exo,
                                            Exec exec = Exec::Parallel);

/// (|Pi A_exo - A Pi - B_c Gamma - B_d E|_F, |F - C Pi|_F). With zero
/// feedthrough these do not depend on kappa.
std::pair<double, double> regulator_residual(const StateSpaceModel& model, double kappa, const Exosystem& exo,
                                             const RegulatorSolution& sol);

/// Gamma in real exosystem coordinates reconstructed from u_reg coefficients,
/// so that Gamma exo_state(t) = u_reg(t).
CMat feedforward_gain(const RegulatorCoefficients& coeffs, const Exosystem& exo);

/// Pi solving Pi A_exo = A^kappa Pi + B_c (Gamma + kappa F) + B_d E for a
/// given Gamma (which need not come from this model). With the model's own
/// Gamma this is the Pi of solve_regulator_equations.
CMat steady_state_map(const StateSpaceModel& model, double kappa, const Exosystem& exo, const CMat& Gamma);

/// Reference whose tracking cancels the disturbance: a_0 = P_d(0) c_0,
/// a_k -+ i b_k = P_d(+-i w_k)(c_k -+ i d_k). Disturbance part is zeroed.
SignalSpec measured_reference_from_disturbance(const StateSpaceModel& model, double kappa, const SignalSpec& spec,
                                               Exec exec = Exec::Parallel);

/// Sampling grid used by linear_regime_margin.
struct MarginGrid {
  double t_end = 0.0;
  std::size_t samples = 0;
  double slack = 0.0;
  bool commensurate = true;
};

MarginGrid margin_grid(const RegulatorCoefficients& coeffs);

/// Largest delta with u_reg(t) in the delta-shrunk linear region over the
/// sampled times, minus the grid slack. Negative when u_reg leaves the
/// saturation balls.
double linear_regime_margin(const RegulatorCoefficients& coeffs, const SaturationSpec& sat,
                            Exec exec = Exec::Parallel);

/// CSV with header k,omega,re_f_1,im_f_1,re_g_1,im_g_1,... Row k = 0 carries
/// f0 in both the f and g columns.
void write_coefficients_csv(std::ostream& out, const RegulatorCoefficients& coeffs);

}  // namespace satreg
