#include "mlock/adler_sync.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "mlock/combmath.hpp"
#include "mlock/errors.hpp"

namespace mlock::adler {

namespace {
constexpr double kPi = std::numbers::pi;
}

AdlerParams AdlerParams::from_threshold(double omega_am, double omega_r, double v_am0,
                                        double v_am) {
  if (!(v_am0 > 0.0)) throw DomainError("AdlerParams: v_am0 must be positive");
  AdlerParams p;
  p.omega_am = omega_am;
  p.omega_r = omega_r;
  p.v_am0 = v_am0;
  p.v_am = v_am;
  p.zeta_am = (omega_am - omega_r) / v_am0;
  p.validate();
  return p;
}

void AdlerParams::validate() const {
  if (!(v_am >= 0.0)) throw DomainError("AdlerParams: v_am must be >= 0");
  if (!(v_am0 > 0.0)) throw DomainError("AdlerParams: v_am0 must be positive");
  if (!std::isfinite(omega_am) || !std::isfinite(omega_r) || !std::isfinite(zeta_am)) {
    throw DomainError("AdlerParams: non-finite frequency or coupling");
  }
}

double normalized_bias(const AdlerParams& params) {
  if (!(params.v_am > 0.0)) {
    throw DomainError("normalized_bias: v_am = 0 means no modulation (never locks)");
  }
  if (params.zeta_am == 0.0) throw DomainError("normalized_bias: zeta_am must be nonzero");
  return (params.omega_am - params.omega_r) / (params.zeta_am * params.v_am);
}

PhaseTrajectory integrate_adler(double i_b, double phi0, double tau_end, double dtau,
                                std::size_t stride) {
  if (!(dtau > 0.0 && dtau <= 0.01)) throw DomainError("integrate_adler: dtau must be in (0, 0.01]");
  if (!(tau_end > 0.0)) throw DomainError("integrate_adler: tau_end must be positive");
  if (stride == 0) stride = 1;
  const auto steps = static_cast<std::size_t>(std::ceil(tau_end / dtau - 1e-9));
  const auto rhs = [i_b](double, const std::array<double, 1>& y) {
    return std::array<double, 1>{adler_velocity(i_b, y[0])};
  };
  PhaseTrajectory out;
  out.tau.reserve(steps / stride + 2);
  out.phi.reserve(steps / stride + 2);
  std::array<double, 1> y{phi0};
  out.tau.push_back(0.0);
  out.phi.push_back(phi0);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i - 1) * dtau;
    y = sde::rk4_step(y, rhs, t, dtau);
    if (i % stride == 0 || i == steps) {
      out.tau.push_back(static_cast<double>(i) * dtau);
      out.phi.push_back(y[0]);
    }
  }
  return out;
}

double unlocked_closed_form(double i_b, double tau) {
  if (!(std::abs(i_b) > 1.0)) {
    throw DomainError("unlocked_closed_form: requires |i_b| > 1 (locked regime has no such form)");
  }
  if (i_b < 0.0) return -unlocked_closed_form(-i_b, tau);
  const double beta = std::acosh(i_b);
  const double sh = std::sinh(beta);
  const double theta_b = kPi - std::atan(sh);
  return sh * combmath::comb_closed(tau * sh + theta_b, beta);
}

double closed_form_origin_phase(double i_b) {
  if (i_b < 0.0) return -closed_form_origin_phase(-i_b);
  return kPi - 2.0 * std::atan(i_b);
}

double beat_frequency(double i_b) {
  const double a = std::abs(i_b);
  if (a < 1.0) return 0.0;
  // (a - 1)(a + 1) avoids cancellation near onset.
  return std::sqrt((a - 1.0) * (a + 1.0));
}

DetectorSpectrum detector_spectrum(const AdlerParams& params, double duration,
                                   double sample_rate, const SweepOptions& options) {
  params.validate();
  if (!(duration > 0.0 && sample_rate > 0.0)) {
    throw DomainError("detector_spectrum: duration and sample_rate must be positive");
  }
  DetectorSpectrum out;
  out.v_am = params.v_am;
  out.i_b = normalized_bias(params);
  const double rate = params.zeta_am * params.v_am;  // d tau / dt
  const double beat = beat_frequency(out.i_b);
  out.beat_hz = std::abs(rate) * beat / (2.0 * kPi);

  out.transient_s = beat > 0.0 ? 10.0 / out.beat_hz : 10.0 / std::abs(rate);
  const double usable = duration - out.transient_s;
  if (beat > 0.0 && usable * out.beat_hz < 50.0) {
    out.warnings.push_back("V_AM=" + std::to_string(params.v_am) +
                           ": fewer than 50 beat periods after transient; sidebands unresolved");
  }
  if (out.beat_hz > 0.0 && out.beat_hz < 2.0 * sample_rate / options.segment_len) {
    out.warnings.push_back("V_AM=" + std::to_string(params.v_am) +
                           ": beat frequency below two PSD bins");
  }
  if (!(usable > 0.0)) throw InsufficientDataError("detector_spectrum: duration shorter than transient");

  const double dt = 1.0 / sample_rate;
  const double dtau = rate * dt;
  if (std::abs(dtau) > 0.01) {
    throw DomainError("detector_spectrum: sample_rate too low for the phase dynamics (|dtau| > 0.01)");
  }
  const auto skip = static_cast<std::size_t>(std::ceil(out.transient_s * sample_rate));
  const auto keep = static_cast<std::size_t>(std::floor(usable * sample_rate));
  if (keep < options.segment_len) {
    throw InsufficientDataError("detector_spectrum: usable samples shorter than one PSD segment");
  }

  // Integrate in tau; the sign of rate is absorbed by integrating the ODE in
  // physical time directly: dphi/dt = rate (i_b - sin phi).
  const double i_b = out.i_b;
  const auto rhs = [rate, i_b](double, const std::array<double, 1>& y) {
    return std::array<double, 1>{rate * adler_velocity(i_b, y[0])};
  };
  std::array<double, 1> y{options.phi0};
  for (std::size_t n = 0; n < skip; ++n) y = sde::rk4_step(y, rhs, n * dt, dt);

  std::vector<double> signal(keep);
  for (std::size_t n = 0; n < keep; ++n) {
    const double t = static_cast<double>(skip + n) * dt;
    signal[n] = std::cos(params.omega_am * t + y[0]);
    y = sde::rk4_step(y, rhs, t, dt);
  }
  out.spectrum = sde::welch_psd(signal, sample_rate, options.segment_len, options.overlap);
  return out;
}

SpectrumMap pd_spectrum_sweep(const AdlerParams& base, const std::vector<double>& v_am_grid,
                              double duration, double sample_rate, const SweepOptions& options) {
  if (v_am_grid.empty()) throw DomainError("pd_spectrum_sweep: empty V_AM grid");
  SpectrumMap map;
  for (double v : v_am_grid) {
    if (!(v > 0.0)) throw DomainError("pd_spectrum_sweep: grid values must be positive");
  }
  for (double v : v_am_grid) {
    AdlerParams p = base;
    p.v_am = v;
    DetectorSpectrum ds = detector_spectrum(p, duration, sample_rate, options);
    const auto& spec = ds.spectrum;
    std::size_t lo = 0;
    std::size_t hi = spec.psd.size() - 1;
    if (options.band_hi_hz > options.band_lo_hz && options.band_hi_hz > 0.0) {
      lo = spec.bin_of(options.band_lo_hz);
      hi = spec.bin_of(options.band_hi_hz);
    }
    if (map.freqs.empty()) {
      map.freqs.assign(spec.freqs.begin() + lo, spec.freqs.begin() + hi + 1);
      map.resolution = spec.resolution;
      map.segments = spec.segments;
    }
    map.v_am.push_back(v);
    map.i_b.push_back(ds.i_b);
    map.psd.emplace_back(spec.psd.begin() + lo, spec.psd.begin() + hi + 1);
    for (auto& w : ds.warnings) map.warnings.push_back(std::move(w));
  }
  return map;
}

SpectralLine strongest_line(const sde::SpectrumResult& spec, double lo_hz, double hi_hz,
                            std::size_t half_width) {
  if (spec.psd.empty()) throw InsufficientDataError("strongest_line: empty spectrum");
  const std::size_t lo = spec.bin_of(lo_hz);
  const std::size_t hi = spec.bin_of(hi_hz);
  if (hi < lo) throw DomainError("strongest_line: empty band");
  std::size_t best = lo;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (spec.psd[k] > spec.psd[best]) best = k;
  }
  SpectralLine line;
  line.bin = best;
  const std::size_t a = best >= half_width ? best - half_width : 0;
  line.power = spec.band_power(a, best + half_width);
  // Power-weighted centroid over the same bins.
  double wsum = 0.0;
  double fsum = 0.0;
  for (std::size_t k = a; k <= std::min(best + half_width, spec.psd.size() - 1); ++k) {
    wsum += spec.psd[k];
    fsum += spec.psd[k] * spec.freqs[k];
  }
  line.freq_hz = wsum > 0.0 ? fsum / wsum : spec.freqs[best];
  return line;
}

const SpectralLine& SidebandLadder::at(int j) const {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == j) return line[i];
  }
  throw DomainError("SidebandLadder: order " + std::to_string(j) + " not measured");
}

double SidebandLadder::amplitude_ratio(int num, int den) const {
  const double d = at(den).power;
  if (!(d > 0.0)) throw InsufficientDataError("SidebandLadder: zero reference power");
  return std::sqrt(at(num).power / d);
}

SidebandLadder sideband_ladder(const sde::SpectrumResult& spec, double center_hz,
                               double spacing_hz, int orders, std::size_t half_width) {
  if (!(spacing_hz > 0.0)) throw DomainError("sideband_ladder: spacing must be positive");
  if (spacing_hz < 4.0 * spec.resolution) {
    throw InsufficientDataError("sideband_ladder: spacing below four PSD bins");
  }
  SidebandLadder out;
  for (int j = -orders; j <= orders; ++j) {
    const double f = center_hz + j * spacing_hz;
    const double lo = f - 0.4 * spacing_hz;
    const double hi = f + 0.4 * spacing_hz;
    if (lo < 0.0 || hi > spec.freqs.back()) continue;
    out.order.push_back(j);
    out.line.push_back(strongest_line(spec, lo, hi, half_width));
  }
  return out;
}

}  // namespace mlock::adler
