#pragma once

// Bolometric optomechanics of the suspended mirror:
//   x'' + 2 gamma_m x' + (omega_m + Theta_PH T_R)^2 x = Theta_FH T_R / m_m
//   T_R' = L_H(t) A_H(x) - kappa_m T_R,   A_H = A_H0 (1 + k_A1 x + k_A2 x^2)
// plus the closed-form effective damping / threshold formulas and the
// amplifier noise chain that sets T_N.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mlock/errors.hpp"

namespace mlock::thermo {

inline constexpr double kHbar = 1.054571817e-34;  // J s

struct MechParams {
  double m_m = 1.0;        // kg
  double omega_m = 1.0;    // rad/s
  double gamma_m = 1e-3;   // 1/s
  double theta_ph = 0.0;   // rad/(s K)
  double theta_fh = 0.0;   // N/K
  double kappa_m = 1e-2;   // 1/s

  // gamma_m < 0.1 omega_m, kappa_m > 0, m_m > 0. With `aluminum_device` also
  // requires Theta_FH < 0 and Theta_PH < 0.
  void validate(bool aluminum_device = false) const;
};

struct AbsorptionModel {
  double a_h0 = 1.0;  // K / (s * intensity unit)
  double k_a1 = 0.0;  // 1/m; > 0 red detuned, < 0 blue detuned
  double k_a2 = 0.0;  // 1/m^2

  void validate() const;
  double operator()(double x) const { return a_h0 * (1.0 + k_a1 * x + k_a2 * x * x); }
};

struct CwDrive {};

// Open-loop pulse train L_0 T_beta(omega_pulse t + phase).
struct CombDrive {
  double beta = 0.1;
  double omega_pulse = 1.0;  // rad/s
  double phase = 0.0;        // rad; 0 puts a peak at t = 0
};

// Pulse train generated by the mirror's own modulation. The pulses are locked
// to the mirror phase with their peak at the absorption minimum (shifted by
// phase_offset). The modulation depth is mu_M = coupling * a, a being the
// quadrature amplitude sqrt(dx^2 + (v/omega_m)^2) about the rest point, and the
// neighbour ratio is the stationary lattice correlation
//   rho = I1(mu_M / T_N) / I0(mu_M / T_N),   beta = -ln(rho) >= beta_floor,
// which tends to beta = T_N / (2 mu_M) for strong modulation.
struct ClosedLoopDrive {
  double coupling = 0.0;    // rad/(s m)
  double t_n = 1.0;         // 1/s
  double beta_floor = 1e-3;
  double phase_offset = 0.0;
};

struct IntensityDrive {
  double l0 = 0.0;  // average intensity
  std::variant<CwDrive, CombDrive, ClosedLoopDrive> mode = CwDrive{};

  void validate() const;
};

// Neighbour ratio I1(k)/I0(k), accurate from k = 0 to overflow range.
double bessel_ratio(double kappa);

struct NoiseChain {
  double g_oa = 1600.0;
  double n_pi = 1.25;
  double gamma_om = 0.0;     // 1/s
  double n_p = 2e6;          // photons per mode
  double lambda_l = 1550e-9; // m
  double delta_lambda = 0.2e-9;
  double l_r = 553.88;       // m
  double n_eff = 1.47;
  double omega_p = 0.0;      // rad/s, optical carrier

  void validate() const;
};

struct NoiseDerived {
  double alpha_nf = 0.0;
  double t_n = 0.0;   // 1/s
  double n_r = 0.0;
  double p_oa = 0.0;  // W
};

struct MirrorTrajectory {
  std::vector<double> time;       // s
  std::vector<double> x;          // m
  std::vector<double> v;          // m/s
  std::vector<double> t_r_rel;    // K
  std::vector<double> intensity;  // L_H(t)
  double x_rest = 0.0;            // static equilibrium displacement
  bool halted = false;            // stopped because |k_A1 x| > 1
  std::string halt_reason;

  std::size_t size() const { return time.size(); }
};

// Thrown when the integration produces a non-finite state; carries the last
// finite one.
class MirrorInstability : public InstabilityError {
 public:
  MirrorInstability(const std::string& what, double time, double x, double v, double t_r)
      : InstabilityError(what), time_(time), x_(x), v_(v), t_r_(t_r) {}
  double time() const noexcept { return time_; }
  double x() const noexcept { return x_; }
  double v() const noexcept { return v_; }
  double t_r() const noexcept { return t_r_; }

 private:
  double time_, x_, v_, t_r_;
};

struct SimulationOptions {
  std::size_t downsample = 1;
  // Initial relative temperature; unset -> static equilibrium for the mean
  // intensity, so only the mechanical perturbation rings.
  std::optional<double> t_r0;
};

struct StaticEquilibrium {
  double x = 0.0;
  double t_r = 0.0;
};

// Rest point with the mean intensity: (omega_m + Theta_PH T)^2 x = Theta_FH T / m,
// kappa T = L_0 A_H(x).
StaticEquilibrium static_equilibrium(const MechParams& mech, const AbsorptionModel& abs,
                                     double l0);

// Fixed-step RK4 in units of 1/omega_m with displacement scaled by 0.1/|k_A1|.
// Requires dt <= 2 pi / (50 omega_m). Stops early (halted = true) once
// |k_A1 x| > 1, where the absorption expansion no longer holds.
MirrorTrajectory simulate(const MechParams& mech, const AbsorptionModel& abs,
                          const IntensityDrive& drive, double x0, double v0, double t_end,
                          double dt, const SimulationOptions& options = {});

// arctan(kappa_m / omega).
double theta_t(double kappa_m, double omega);

// k_A1 Theta_FH L_0 A_H0 / (2 m_m omega_m^2).
double gamma_h0(const MechParams& mech, const AbsorptionModel& abs, double l0);
// -(2 omega_m / T_N) gamma_H0.
double gamma_h1(const MechParams& mech, const AbsorptionModel& abs, double l0, double t_n);

struct EffectiveParams {
  double omega_eff = 0.0;
  double gamma_eff = 0.0;
  bool unstable() const { return gamma_eff < 0.0; }
};

// omega_eff = omega_m + (kappa_m/omega_m)(gamma_H0 + gamma_H1),
// gamma_eff = gamma_m + gamma_H0 + gamma_H1.
EffectiveParams effective_params(const MechParams& mech, double gamma_h0, double gamma_h1);

struct LinearResponse {
  double delta_gamma = 0.0;  // added damping rate, 1/s
  double delta_omega = 0.0;  // shift of the undamped frequency, rad/s
};

// Added damping and frequency shift from projecting the thermal force onto the
// velocity and displacement quadratures of x = x0 cos(omega t), linearised
// about the static equilibrium. Exact in kappa_m / omega (no small-kappa
// expansion). The closed-loop overload adds the motion-induced intensity
// modulation.
LinearResponse linear_response_oracle(const MechParams& mech, const AbsorptionModel& abs,
                                      double l0, double omega_drive);
LinearResponse linear_response_oracle(const MechParams& mech, const AbsorptionModel& abs,
                                      const IntensityDrive& drive, double omega_drive);

struct ModeEstimate {
  double omega = 0.0;  // rad/s
  double gamma = 0.0;  // 1/s, negative when growing
};

// Self-consistent version of the oracle: the oscillating root s = -gamma + i omega
// of (s^2 + 2 gamma_m s + omega'^2)(s + kappa_m) = c_T (h_x + h_v s), i.e. the
// thermal transfer function evaluated at the complex frequency of the mode.
// Defined for cw and closed-loop drives.
ModeEstimate oracle_mode(const MechParams& mech, const AbsorptionModel& abs,
                         const IntensityDrive& drive);

// Fits x - x_rest to A exp(-gamma t) cos(omega t + phi): log-envelope regression
// on interpolated extrema for gamma, zero-crossing regression for omega.
// Samples before t_start are ignored. Needs at least 5 extrema.
ModeEstimate ringdown_extract(const MirrorTrajectory& traj, double t_start = 0.0);

// Intensity at which gamma_m + gamma_H0 = 0, or nullopt if the sign of
// k_A1 Theta_FH is stabilising.
std::optional<double> seo_threshold(const MechParams& mech, const AbsorptionModel& abs);
// Intensity at which gamma_m + gamma_H0 + gamma_H1 = 0 (closed ORC-mechanical
// detuning), or nullopt if the combination is stabilising.
std::optional<double> mml_threshold(const MechParams& mech, const AbsorptionModel& abs,
                                    double t_n);

// Coupling for which the closed-loop drive adds exactly gamma_H1 at linear
// order: 2 omega_m |k_A1|.
double mml_coupling(const MechParams& mech, const AbsorptionModel& abs);

// Comb phase that puts pulse peaks on the turning point where A_H is minimal,
// for a mirror started at (x0 - x_rest, v0) oscillating at omega.
double absorption_min_phase(const AbsorptionModel& abs, double x0_rel, double v0,
                            double omega, double omega_pulse);

// 2 n_PI (G_OA - 1) / G_OA.
double noise_figure(double g_oa, double n_pi);
NoiseDerived effective_noise(const NoiseChain& chain);

struct ProbeSettings {
  double relative_amplitude = 1e-3;  // initial |k_A1| dx (or 1e-9 m if k_A1 = 0)
  double decay_lengths = 1.0;        // run length in units of 1 / gamma_m
  std::size_t steps_per_cycle = 64;
  std::size_t downsample = 1;
};

// Starts the mirror slightly off its rest point and returns the fitted
// (omega, gamma); gamma < 0 means the motion grows.
ModeEstimate probe_growth(const MechParams& mech, const AbsorptionModel& abs,
                          const IntensityDrive& drive, const ProbeSettings& settings = {});

struct ThresholdReport {
  double formula = 0.0;    // closed-form threshold intensity
  double simulated = 0.0;  // bisection midpoint from simulations
  double lower = 0.0;      // largest intensity seen decaying
  double upper = 0.0;      // smallest intensity seen growing
  double relative_gap = 0.0;
  int simulations = 0;
};

// Bisection on L_0 around `formula` (bracket [0.5, 2] x formula) until
// upper/lower - 1 <= tolerance. `drive_template` supplies the drive mode.
ThresholdReport bracket_threshold(const MechParams& mech, const AbsorptionModel& abs,
                                  const IntensityDrive& drive_template, double formula,
                                  double tolerance = 0.01, const ProbeSettings& settings = {});

}  // namespace mlock::thermo
