#include "mlock/sde_engine.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <numbers>

namespace mlock::sde {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

// 53-bit uniform in (0, 1]: never returns 0, so log() in Box-Muller is safe.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 1.0) * 0x1.0p-53;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t counter, std::uint64_t stream)
    : seed_(seed), counter_(counter), stream_(stream) {}

std::array<std::uint32_t, 4> RngStream::block(std::uint64_t counter) const {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32_10(ctr, key);
}

std::array<double, 2> RngStream::next_normal_pair() {
  const auto b = block(counter_++);
  const double u1 = to_unit(b[0], b[1]);
  const double u2 = to_unit(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

double RngStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto pair = next_normal_pair();
  spare_ = pair[1];
  has_spare_ = true;
  return pair[0];
}

double RngStream::next_uniform() {
  const auto b = block(counter_++);
  // (0,1]; map to (0,1) by reflecting the single endpoint.
  const double u = to_unit(b[0], b[1]);
  return u == 1.0 ? 0x1.0p-54 : u;
}

void RngStream::fill_normal(std::span<double> out) {
  std::size_t i = 0;
  if (has_spare_ && !out.empty()) {
    out[i++] = spare_;
    has_spare_ = false;
  }
  for (; i + 1 < out.size(); i += 2) {
    const auto pair = next_normal_pair();
    out[i] = pair[0];
    out[i + 1] = pair[1];
  }
  if (i < out.size()) out[i] = next_normal();
}

std::vector<double> RngStream::normal_draws(std::size_t n) {
  std::vector<double> out(n);
  fill_normal(out);
  return out;
}

std::vector<double> normal_draws(RngStream& stream, std::size_t n) {
  return stream.normal_draws(n);
}

double SpectrumResult::band_power(std::size_t lo, std::size_t hi) const {
  if (psd.empty()) return 0.0;
  hi = std::min(hi, psd.size() - 1);
  double sum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) sum += psd[i];
  return sum * resolution;
}

std::size_t SpectrumResult::bin_of(double freq) const {
  if (resolution <= 0.0 || psd.empty()) return 0;
  const double idx = std::round(freq / resolution);
  if (idx <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), psd.size() - 1);
}

SpectrumResult welch_psd(std::span<const double> signal, double sample_rate,
                         std::size_t segment_len, double overlap) {
  if (!(sample_rate > 0.0)) throw DomainError("welch_psd: sample_rate must be positive");
  if (segment_len < 2 || (segment_len & (segment_len - 1)) != 0) {
    throw DomainError("welch_psd: segment_len must be a power of two >= 2");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("welch_psd: overlap must be in [0, 1)");
  if (signal.size() < segment_len) {
    throw InsufficientDataError("welch_psd: signal shorter than one segment (" +
                                std::to_string(signal.size()) + " < " +
                                std::to_string(segment_len) + ")");
  }

  const std::size_t n = segment_len;
  const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(n * (1.0 - overlap))));
  const std::size_t nbins = n / 2 + 1;

  std::vector<double> window(n);
  double window_power = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Periodic Hann.
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
    window_power += window[i] * window[i];
  }

  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }

  SpectrumResult result;
  result.psd.assign(nbins, 0.0);
  result.resolution = sample_rate / static_cast<double>(n);

  for (std::size_t start = 0; start + n <= signal.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += signal[start + i];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = (signal[start + i] - mean) * window[i];
    fftw_execute(plan.get());
    for (std::size_t k = 0; k < nbins; ++k) {
      const double re = out.get()[k][0];
      const double im = out.get()[k][1];
      result.psd[k] += re * re + im * im;
    }
    ++result.segments;
  }

  const double scale = 1.0 / (sample_rate * window_power * static_cast<double>(result.segments));
  for (std::size_t k = 0; k < nbins; ++k) {
    const bool edge = (k == 0) || (k == nbins - 1);
    result.psd[k] *= scale * (edge ? 1.0 : 2.0);
  }
  result.freqs.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) result.freqs[k] = result.resolution * static_cast<double>(k);
  return result;
}

}  // namespace mlock::sde
