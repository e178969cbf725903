#pragma once

// Gaussian pulse E(t) = E0 exp(-gamma t^2 + i omega_p t) passed through cavity
// elements that act on 1/gamma as Moebius maps
//   1/gamma_out = (A/gamma_in + B) / (C/gamma_in + D).
// A modulator is "time-like" (gamma_out = gamma_in + gamma_T); a filter or gain
// band is "frequency-like" (1/gamma_out = 1/gamma_in + 1/gamma_F).

#include <complex>
#include <vector>

namespace mlock::pulse {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct PulseState {
  cplx gamma{1.0, 0.0};  // 1/time^2; Re(gamma) > 0 sets the width
  cplx e0{1.0, 0.0};     // carried, never transformed
  double omega_p = 0.0;  // carried, never transformed

  void validate() const;
};

struct MoebiusElement {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  cplx c{0.0, 0.0};
  cplx d{1.0, 0.0};

  static MoebiusElement identity() { return {}; }
  cplx determinant() const { return a * d - b * c; }
  void validate() const;
};

// Normalised round-trip description: g = gamma / gamma_F, g_m^2 = gamma_T / gamma_F.
struct NormalizedPulse {
  cplx g{0.0, 0.0};
  cplx g_m{0.0, 0.0};
  double tau_r = 0.0;  // round trips elapsed, t / t_R
  double t_r = 1.0;    // cavity period, s

  void validate() const;
};

// (A, B, C, D) = (1, 0, gamma_T, 1).
MoebiusElement element_time_like(cplx gamma_t);
// (A, B, C, D) = (1, 1/gamma_F, 0, 1).
MoebiusElement element_freq_like(cplx gamma_f);

// Element equivalent to applying `first`, then `second`.
MoebiusElement compose(const MoebiusElement& first, const MoebiusElement& second);
MoebiusElement inverse(const MoebiusElement& element);

// gamma_out for a given gamma_in. Written as (C + D gamma)/(A + B gamma) so
// gamma_in = 0 (an unformed pulse) is admissible; throws SingularityError at the
// pole A + B gamma = 0.
cplx apply(const MoebiusElement& element, cplx gamma);
PulseState apply(const MoebiusElement& element, const PulseState& pulse);

// Time-like element followed by a frequency-like one:
// (1 + g_m^2, 1/gamma_F, gamma_F g_m^2, 1).
MoebiusElement roundtrip_element(cplx gamma_t, cplx gamma_f);

// The same loop in normalised units (gamma_F = 1, gamma_T = g_m^2), acting on g.
MoebiusElement normalized_roundtrip(cplx g_m);

// g_0 .. g_n under n applications of normalized_roundtrip(g_m). Throws
// InstabilityError once |g| > 1 (outside the perturbative regime).
std::vector<cplx> roundtrip_iterate(cplx g0, cplx g_m, int n);

// g_m tanh(g_m (tau_R - tau_R0)), the solution of dg/dtau_R = g_m^2 - g^2.
cplx continuous_solution(cplx g_m, double tau_r, double tau_r0 = 0.0);

// |gamma_F|^(1/2) = (2 pi c / (lambda_L n_eff)) (delta_lambda / lambda_L), rad/s.
double gamma_f_from_band(double delta_lambda, double lambda_l, double n_eff);

// (gamma_T / gamma_F)^(1/2), principal branch.
cplx g_m_from(cplx gamma_t, cplx gamma_f);

}  // namespace mlock::pulse
