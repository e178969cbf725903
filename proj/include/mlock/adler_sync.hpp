#pragma once

// Locking of the pulse train to an external amplitude modulation. The relative
// phase obeys the Adler equation
//   dphi/dtau + sin(phi) = i_b,   tau = zeta_AM V_AM t,
//   i_b = (omega_AM - omega_R) / (zeta_AM V_AM).
// |i_b| <= 1 locks; otherwise the phase slips at the beat rate sqrt(i_b^2 - 1).

#include <cmath>
#include <string>
#include <vector>

#include "mlock/sde_engine.hpp"

namespace mlock::adler {

struct AdlerParams {
  double omega_am = 0.0;  // modulation angular frequency, rad/s
  double omega_r = 0.0;   // cavity round-trip angular frequency, rad/s
  double zeta_am = 0.0;   // coupling, rad/(s V)
  double v_am = 0.0;      // modulation amplitude, V
  double v_am0 = 0.0;     // locking threshold amplitude, V

  // zeta_AM = (omega_AM - omega_R) / V_AM,0, so that i_b = V_AM,0 / V_AM.
  static AdlerParams from_threshold(double omega_am, double omega_r, double v_am0, double v_am);
  void validate() const;
};

struct PhaseTrajectory {
  std::vector<double> tau;
  std::vector<double> phi;  // unwrapped

  std::size_t size() const { return tau.size(); }
};

double normalized_bias(const AdlerParams& params);

// RK4 in tau with step dtau (<= 0.01). Records every `stride`-th step plus the
// endpoint.
PhaseTrajectory integrate_adler(double i_b, double phi0, double tau_end, double dtau,
                                std::size_t stride = 1);

// Right-hand side i_b - sin(phi).
inline double adler_velocity(double i_b, double phi) { return i_b - std::sin(phi); }

// Unlocked phase velocity sinh(b) T_b(tau sinh(b) + theta_b), b = acosh(i_b),
// theta_b = pi - atan(sinh b). Defined for |i_b| > 1; negative bias is mapped
// through phi -> -phi.
double unlocked_closed_form(double i_b, double tau);

// Initial phase for which integrate_adler reproduces unlocked_closed_form with
// the same time origin: pi - 2 atan(i_b).
double closed_form_origin_phase(double i_b);

// sqrt(i_b^2 - 1), or 0 inside the locking range.
double beat_frequency(double i_b);

struct SweepOptions {
  std::size_t segment_len = 1u << 17;
  double overlap = 0.5;
  // Rows kept in the output map; both <= 0 keeps the full band.
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  double phi0 = 0.0;
};

struct DetectorSpectrum {
  double v_am = 0.0;
  double i_b = 0.0;
  double beat_hz = 0.0;          // 0 when locked
  double transient_s = 0.0;      // discarded before the PSD
  sde::SpectrumResult spectrum;  // full band
  std::vector<std::string> warnings;
};

// Integrates the phase in physical time, samples s(t) = cos(omega_AM t + phi(t))
// and estimates its PSD. Ten beat periods (ten relaxation times when locked)
// are discarded first.
DetectorSpectrum detector_spectrum(const AdlerParams& params, double duration,
                                   double sample_rate, const SweepOptions& options = {});

struct SpectrumMap {
  std::vector<double> v_am;
  std::vector<double> i_b;
  std::vector<double> freqs;               // kept band, Hz
  std::vector<std::vector<double>> psd;    // psd[v][f]
  double resolution = 0.0;
  std::size_t segments = 0;
  std::vector<std::string> warnings;
};

SpectrumMap pd_spectrum_sweep(const AdlerParams& base, const std::vector<double>& v_am_grid,
                              double duration, double sample_rate,
                              const SweepOptions& options = {});

// A spectral line located by the peak search below.
struct SpectralLine {
  double freq_hz = 0.0;
  double power = 0.0;  // integrated over +-half_width bins
  std::size_t bin = 0;
};

// Strongest line within [lo_hz, hi_hz], power integrated over +-half_width bins.
SpectralLine strongest_line(const sde::SpectrumResult& spec, double lo_hz, double hi_hz,
                            std::size_t half_width = 3);

// Lines at center + j * spacing for j = -orders..orders, each the strongest
// within +-0.4 spacing of its nominal position.
struct SidebandLadder {
  std::vector<int> order;
  std::vector<SpectralLine> line;
  const SpectralLine& at(int j) const;
  // sqrt of the power ratio, i.e. an amplitude ratio.
  double amplitude_ratio(int num, int den) const;
};
SidebandLadder sideband_ladder(const sde::SpectrumResult& spec, double center_hz,
                               double spacing_hz, int orders = 3, std::size_t half_width = 3);

}  // namespace mlock::adler
