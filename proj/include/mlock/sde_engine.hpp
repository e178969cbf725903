#pragma once

// Shared numerical plumbing: counter-based normal draws, a fixed-step RK4
// stepper and a Welch power-spectral-density estimator.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlock/errors.hpp"

namespace mlock::sde {

// Philox4x32-10 keyed by the seed. The 128-bit counter is split into a
// 64-bit block index and a 64-bit substream index, so parallel workers can
// take `substream(seed, worker)` without coordinating. One block yields two
// standard normals (Box-Muller on two 53-bit uniforms).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0, std::uint64_t stream = 0);

  static RngStream substream(std::uint64_t seed, std::uint64_t index) {
    return RngStream(seed, 0, index);
  }

  double next_normal();
  // Uniform on the open interval (0, 1).
  double next_uniform();
  void fill_normal(std::span<double> out);
  std::vector<double> normal_draws(std::size_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Raw Philox output for block `counter` of this stream (exposed for the
  // known-answer test).
  std::array<std::uint32_t, 4> block(std::uint64_t counter) const;

 private:
  std::array<double, 2> next_normal_pair();

  std::uint64_t seed_;
  std::uint64_t counter_;
  std::uint64_t stream_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<double> normal_draws(RngStream& stream, std::size_t n);

template <class State>
inline bool all_finite(const State& y) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) return false;
  }
  return true;
}

// Classical fourth-order Runge-Kutta step. `State` is any fixed- or
// dynamic-size container with size() and operator[] (std::array, std::vector);
// `deriv(t, y)` returns a State of the same size.
template <class State, class Deriv>
State rk4_step(const State& y, Deriv&& deriv, double t, double dt) {
  const std::size_t n = y.size();
  auto checked = [&](const State& k, double at) {
    if (!all_finite(k)) throw IntegrationError("rk4_step: non-finite derivative", at);
    return k;
  };
  State tmp = y;

  const State k1 = checked(deriv(t, y), t);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  const State k2 = checked(deriv(t + 0.5 * dt, tmp), t + 0.5 * dt);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  const State k3 = checked(deriv(t + 0.5 * dt, tmp), t + 0.5 * dt);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  const State k4 = checked(deriv(t + dt, tmp), t + dt);

  State out = y;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

struct SpectrumResult {
  std::vector<double> freqs;  // Hz, ascending, 0 .. sample_rate/2
  std::vector<double> psd;    // power per Hz, one-sided
  double resolution = 0.0;    // bin spacing, Hz
  std::size_t segments = 0;

  // Sum of psd * resolution over bins [lo, hi], clamped to the valid range.
  double band_power(std::size_t lo, std::size_t hi) const;
  std::size_t bin_of(double freq) const;
};

// Hann-windowed, overlap-averaged periodogram. Each segment has its mean
// removed, so the integral of the result over frequency equals the signal
// variance. `segment_len` must be a power of two no larger than the signal.
SpectrumResult welch_psd(std::span<const double> signal, double sample_rate,
                         std::size_t segment_len, double overlap = 0.5);

}  // namespace mlock::sde
