#include "mlock/phase_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mlock/errors.hpp"

namespace mlock::lattice {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(const LatticeState& state) {
  for (double th : state.theta) {
    if (!std::isfinite(th)) throw IntegrationError("lattice: non-finite phase", state.time);
  }
}

void require_size(const LatticeState& state, const LatticeConfig& config) {
  if (state.theta.size() != static_cast<std::size_t>(config.n_modes)) {
    throw DomainError("lattice: state has " + std::to_string(state.theta.size()) +
                      " phases, config expects " + std::to_string(config.n_modes));
  }
}

// sin(theta_{m-1} - theta_m) for every present bond; bond b joins modes b and
// b+1 (b = n-1 joins n-1 and 0 on a ring).
void bond_sines(const std::vector<double>& theta, Boundary boundary, std::vector<double>& out) {
  const std::size_t n = theta.size();
  const std::size_t bonds = boundary == Boundary::periodic ? n : n - 1;
  out.resize(bonds);
  for (std::size_t b = 0; b < bonds; ++b) {
    const std::size_t next = (b + 1) % n;
    out[b] = std::sin(theta[b] - theta[next]);
  }
}

void accumulate_drift(const std::vector<double>& sines, std::size_t n, double mu,
                      std::vector<double>& out) {
  out.assign(n, 0.0);
  for (std::size_t b = 0; b < sines.size(); ++b) {
    const std::size_t next = (b + 1) % n;
    // Bond b contributes sin(theta_b - theta_next) to mode `next` and the
    // opposite to mode b.
    out[next] += mu * sines[b];
    out[b] -= mu * sines[b];
  }
}

}  // namespace

void LatticeConfig::validate() const {
  if (n_modes < 3) throw DomainError("LatticeConfig: n_modes must be >= 3");
  if (!(mu_m > 0.0) || !std::isfinite(mu_m)) throw DomainError("LatticeConfig: mu_m must be positive");
  if (!(t_n >= 0.0) || !std::isfinite(t_n)) throw DomainError("LatticeConfig: t_n must be >= 0");
  if (!(dt > 0.0)) throw DomainError("LatticeConfig: dt must be positive");
  if (dt * mu_m > 0.1) throw DomainError("LatticeConfig: dt * mu_m must be <= 0.1 for stability");
}

std::size_t LatticeConfig::default_burn_in() const {
  return static_cast<std::size_t>(std::ceil(10.0 / (mu_m * dt)));
}

ModeAmplitudes ModeAmplitudes::uniform(std::size_t n, double value) {
  return ModeAmplitudes{std::vector<double>(n, value)};
}

void ModeAmplitudes::validate(std::size_t n_modes) const {
  if (r.size() != n_modes) throw DomainError("ModeAmplitudes: length does not match the state");
  bool any = false;
  for (double x : r) {
    if (!(x >= 0.0)) throw DomainError("ModeAmplitudes: amplitudes must be nonnegative");
    any = any || x > 0.0;
  }
  if (!any) throw DomainError("ModeAmplitudes: at least one amplitude must be nonzero");
}

std::vector<double> drift(const LatticeState& state, const LatticeConfig& config) {
  require_size(state, config);
  std::vector<double> sines;
  std::vector<double> out;
  bond_sines(state.theta, config.boundary, sines);
  accumulate_drift(sines, state.theta.size(), config.mu_m, out);
  return out;
}

double hamiltonian(const LatticeState& state, const LatticeConfig& config) {
  require_size(state, config);
  const std::size_t n = state.theta.size();
  const std::size_t bonds = config.boundary == Boundary::periodic ? n : n - 1;
  double h = 0.0;
  for (std::size_t b = 0; b < bonds; ++b) {
    h -= std::cos(state.theta[b] - state.theta[(b + 1) % n]);
  }
  return config.mu_m * h;
}

LatticeState step_lattice(const LatticeState& state, const LatticeConfig& config,
                          sde::RngStream& rng) {
  config.validate();
  require_size(state, config);
  require_finite(state);
  const std::vector<double> f = drift(state, config);
  const double amp = std::sqrt(2.0 * config.t_n * config.dt);
  LatticeState next = state;
  for (std::size_t m = 0; m < next.theta.size(); ++m) {
    next.theta[m] += config.dt * f[m];
    if (amp > 0.0) next.theta[m] += amp * rng.next_normal();
  }
  next.time += config.dt;
  require_finite(next);
  return next;
}

LangevinIntegrator::LangevinIntegrator(LatticeConfig config)
    : config_(config), rng_(config.seed) {
  config_.validate();
}

void LangevinIntegrator::step(LatticeState& state) {
  const std::size_t n = state.theta.size();
  bond_sines(state.theta, config_.boundary, bond_sin_);
  const double mu_dt = config_.mu_m * config_.dt;
  const double amp = std::sqrt(2.0 * config_.t_n * config_.dt);
  if (amp > 0.0) {
    noise_.resize(n);
    rng_.fill_normal(noise_);
  }
  for (std::size_t b = 0; b < bond_sin_.size(); ++b) {
    const std::size_t next = (b + 1) % n;
    state.theta[next] += mu_dt * bond_sin_[b];
    state.theta[b] -= mu_dt * bond_sin_[b];
  }
  if (amp > 0.0) {
    for (std::size_t m = 0; m < n; ++m) state.theta[m] += amp * noise_[m];
  }
  state.time += config_.dt;
}

void LangevinIntegrator::advance(LatticeState& state, std::size_t steps) {
  if (state.theta.size() != static_cast<std::size_t>(config_.n_modes)) {
    throw DomainError("LangevinIntegrator: state size does not match config");
  }
  for (std::size_t i = 0; i < steps; ++i) step(state);
  require_finite(state);
}

double sample_von_mises(double kappa, sde::RngStream& rng) {
  if (!(kappa >= 0.0)) throw DomainError("sample_von_mises: kappa must be >= 0");
  if (kappa < 1e-8) return kPi * (2.0 * rng.next_uniform() - 1.0);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  while (true) {
    const double u1 = rng.next_uniform();
    const double u2 = rng.next_uniform();
    const double u3 = rng.next_uniform();
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double angle = std::acos(std::clamp(f, -1.0, 1.0));
      return u3 > 0.5 ? angle : -angle;
    }
  }
}

LatticeState sample_gibbs(double beta_n, int n_modes, sde::RngStream& rng, GibbsLaw law,
                          Boundary boundary) {
  if (boundary == Boundary::periodic) {
    throw UnsupportedError("sample_gibbs: periodic boundary couples the bonds through the "
                           "winding constraint; only the open chain is supported");
  }
  if (n_modes < 1) throw DomainError("sample_gibbs: n_modes must be >= 1");
  if (!(beta_n >= 0.0)) throw DomainError("sample_gibbs: beta_n must be >= 0");
  if (law == GibbsLaw::gaussian && beta_n > 0.5) {
    throw DomainError("sample_gibbs: Gaussian law requires beta_n <= 0.5 (weak noise)");
  }
  LatticeState state;
  state.theta.assign(static_cast<std::size_t>(n_modes), 0.0);
  if (beta_n == 0.0) return state;
  const double sd = std::sqrt(2.0 * beta_n);
  const double kappa = 1.0 / (2.0 * beta_n);
  for (int m = 1; m < n_modes; ++m) {
    const double step = law == GibbsLaw::gaussian ? sd * rng.next_normal()
                                                  : sample_von_mises(kappa, rng);
    // theta_{m-1} - theta_m = step.
    state.theta[m] = state.theta[m - 1] - step;
  }
  return state;
}

LatticeState sample_gibbs(double beta_n, int n_modes, std::uint64_t seed, GibbsLaw law,
                          Boundary boundary) {
  sde::RngStream rng(seed);
  return sample_gibbs(beta_n, n_modes, rng, law, boundary);
}

std::vector<double> intensity_waveform(const LatticeState& state, const ModeAmplitudes& amps,
                                       std::span<const double> s_grid) {
  const std::size_t n = state.theta.size();
  amps.validate(n);
  std::vector<double> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double arg = static_cast<double>(m) * s + state.theta[m];
      re += amps.r[m] * std::cos(arg);
      im += amps.r[m] * std::sin(arg);
    }
    out.push_back((re * re + im * im) / static_cast<double>(n));
  }
  return out;
}

std::complex<double> phase_correlation(std::span<const LatticeState> trajectory, int k) {
  if (trajectory.empty()) throw InsufficientDataError("phase_correlation: empty trajectory");
  const int n = static_cast<int>(trajectory.front().theta.size());
  if (k < 0) k = -k;
  if (k >= n) throw DomainError("phase_correlation: |k| must be < n_modes");
  double re = 0.0;
  double im = 0.0;
  std::size_t count = 0;
  for (const auto& state : trajectory) {
    for (int m = k; m < n; ++m) {
      const double d = state.theta[m - k] - state.theta[m];
      re += std::cos(d);
      im += std::sin(d);
      ++count;
    }
  }
  return {re / static_cast<double>(count), im / static_cast<double>(count)};
}

double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);  // [-pi, pi]
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

void BatchedMean::add(double x) {
  total_ += x;
  ++count_;
  current_ += x;
  if (++in_batch_ == batch_size_) {
    batch_means_.push_back(current_ / static_cast<double>(batch_size_));
    current_ = 0.0;
    in_batch_ = 0;
  }
}

double BatchedMean::mean() const {
  return count_ ? total_ / static_cast<double>(count_) : 0.0;
}

double BatchedMean::standard_error() const {
  const std::size_t b = batch_means_.size();
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : batch_means_) mean += v;
  mean /= static_cast<double>(b);
  double var = 0.0;
  for (double v : batch_means_) var += (v - mean) * (v - mean);
  var /= static_cast<double>(b - 1);
  return std::sqrt(var / static_cast<double>(b));
}

LatticeStatistics::LatticeStatistics(int max_k, std::size_t batch_size)
    : max_k_(max_k),
      bond_square_(batch_size),
      corr_re_(static_cast<std::size_t>(max_k + 1), BatchedMean(batch_size)),
      corr_im_(static_cast<std::size_t>(max_k + 1), BatchedMean(batch_size)),
      energy_(batch_size) {
  if (max_k < 0) throw DomainError("LatticeStatistics: max_k must be >= 0");
}

void LatticeStatistics::add(const LatticeState& state) {
  const int n = static_cast<int>(state.theta.size());
  if (max_k_ >= n) throw DomainError("LatticeStatistics: max_k must be < n_modes");
  double sq = 0.0;
  for (int m = 1; m < n; ++m) {
    const double d = wrap_phase(state.theta[m - 1] - state.theta[m]);
    sq += d * d;
  }
  bond_square_.add(sq / static_cast<double>(n - 1));
  for (int k = 0; k <= max_k_; ++k) {
    double re = 0.0;
    double im = 0.0;
    for (int m = k; m < n; ++m) {
      const double d = state.theta[m - k] - state.theta[m];
      re += std::cos(d);
      im += std::sin(d);
    }
    corr_re_[k].add(re / static_cast<double>(n - k));
    corr_im_[k].add(im / static_cast<double>(n - k));
  }
  if (has_config_) energy_.add(hamiltonian(state, config_));
}

LatticeState run_langevin(const LatticeConfig& config, const LangevinRun& run,
                          const std::function<void(const LatticeState&)>& observer) {
  LangevinIntegrator integrator(config);
  LatticeState state;
  state.theta.assign(static_cast<std::size_t>(config.n_modes), 0.0);
  const std::size_t burn = run.burn_in ? run.burn_in : config.default_burn_in();
  integrator.advance(state, burn);
  const std::size_t every = run.sample_every ? run.sample_every : 1;
  for (std::size_t done = 0; done < run.steps; done += every) {
    const std::size_t chunk = std::min(every, run.steps - done);
    integrator.advance(state, chunk);
    if (chunk == every && observer) observer(state);
  }
  return state;
}

double open_chain_correlation(double beta_n, int k) {
  if (!(beta_n > 0.0)) throw DomainError("open_chain_correlation: beta_n must be positive");
  if (k < 0) k = -k;
  const double kappa = 0.5 / beta_n;
  double rho;
  if (kappa > 500.0) {
    const double r = 1.0 / kappa;
    rho = 1.0 - 0.5 * r - 0.125 * r * r - 0.125 * r * r * r;
  } else {
    rho = std::cyl_bessel_i(1.0, kappa) / std::cyl_bessel_i(0.0, kappa);
  }
  return std::pow(rho, k);
}

double open_chain_bond_square(double beta_n) {
  if (!(beta_n > 0.0)) throw DomainError("open_chain_bond_square: beta_n must be positive");
  const double kappa = 0.5 / beta_n;
  // Simpson on [0, pi] with the peak factored out: exp(kappa (cos d - 1)).
  const int n = 20000;
  const double h = std::numbers::pi / n;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double d = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double f = std::exp(kappa * (std::cos(d) - 1.0));
    num += w * d * d * f;
    den += w * f;
  }
  return num / den;
}

}  // namespace mlock::lattice
