#pragma once

// Mode-phase lattice driven by nearest-neighbour sideband coupling and white
// noise:
//   dtheta_m/dt = mu_M [sin(theta_{m-1} - theta_m) + sin(theta_{m+1} - theta_m)] + q_m,
//   <q_m(t) q_n(t')> = 2 T_N delta_mn delta(t - t').
// The drift is -dH/dtheta_m with H = -mu_M sum_m cos(theta_{m-1} - theta_m), so
// the stationary law is exp(-H / T_N).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mlock/sde_engine.hpp"

namespace mlock::lattice {

enum class Boundary { open_chain, periodic };

struct LatticeConfig {
  int n_modes = 64;
  double mu_m = 1.0;   // modulation amplitude, 1/time
  double t_n = 0.2;    // noise strength, 1/time
  double dt = 1e-3;
  std::uint64_t seed = 1;
  Boundary boundary = Boundary::open_chain;

  void validate() const;
  // beta_N = T_N / (2 mu_M); neighbour differences have variance 2 beta_N in the
  // weak-noise limit.
  double beta_n() const { return t_n / (2.0 * mu_m); }
  // 10 / (mu_M dt): ten relaxation times of the fastest bond mode.
  std::size_t default_burn_in() const;
};

struct LatticeState {
  std::vector<double> theta;  // unwrapped phases
  double time = 0.0;

  std::size_t size() const { return theta.size(); }
};

struct ModeAmplitudes {
  std::vector<double> r;

  static ModeAmplitudes uniform(std::size_t n, double value = 1.0);
  void validate(std::size_t n_modes) const;
};

// Deterministic part of the step, -dH/dtheta.
std::vector<double> drift(const LatticeState& state, const LatticeConfig& config);

double hamiltonian(const LatticeState& state, const LatticeConfig& config);

// One Euler-Maruyama step:
//   theta <- theta + dt * drift + sqrt(2 T_N dt) * xi.
LatticeState step_lattice(const LatticeState& state, const LatticeConfig& config,
                          sde::RngStream& rng);

// In-place integrator that reuses its scratch buffers; owns the noise stream
// derived from config.seed.
class LangevinIntegrator {
 public:
  explicit LangevinIntegrator(LatticeConfig config);

  const LatticeConfig& config() const { return config_; }
  void step(LatticeState& state);
  void advance(LatticeState& state, std::size_t steps);

 private:
  LatticeConfig config_;
  sde::RngStream rng_;
  std::vector<double> bond_sin_;
  std::vector<double> noise_;
};

enum class GibbsLaw {
  // Independent Gaussian bond differences with variance 2 beta_N.
  gaussian,
  // Exact open-chain Gibbs law: bonds are independent von Mises with
  // concentration 1 / (2 beta_N) = mu_M / T_N.
  von_mises,
};

LatticeState sample_gibbs(double beta_n, int n_modes, sde::RngStream& rng,
                          GibbsLaw law = GibbsLaw::gaussian,
                          Boundary boundary = Boundary::open_chain);
LatticeState sample_gibbs(double beta_n, int n_modes, std::uint64_t seed,
                          GibbsLaw law = GibbsLaw::gaussian,
                          Boundary boundary = Boundary::open_chain);

// Exact open-chain stationary moments. Each bond difference is independent
// with density proportional to exp((mu/T_N) cos d) = exp(cos(d) / (2 beta_N)).
// <exp(i k d_sum)> over k bonds = (I1/I0)^k; the Gaussian approximation gives
// exp(-k beta_N) and <d^2> = 2 beta_N instead.
double open_chain_correlation(double beta_n, int k);
double open_chain_bond_square(double beta_n);

// One von Mises variate with zero mean direction (Best-Fisher rejection).
double sample_von_mises(double kappa, sde::RngStream& rng);

// N^-1 |sum_m r_m exp(i(m s + theta_m))|^2 at each grid point.
std::vector<double> intensity_waveform(const LatticeState& state, const ModeAmplitudes& amps,
                                       std::span<const double> s_grid);

// Time-and-site average of exp(i(theta_{m-k} - theta_m)).
std::complex<double> phase_correlation(std::span<const LatticeState> trajectory, int k);

// Neighbour difference wrapped into (-pi, pi].
double wrap_phase(double x);

// Running mean with a batch-means standard error for serially correlated
// samples.
class BatchedMean {
 public:
  explicit BatchedMean(std::size_t batch_size = 1) : batch_size_(batch_size ? batch_size : 1) {}

  void add(double x);
  double mean() const;
  // Standard error of the mean from completed batches; 0 with fewer than two.
  double standard_error() const;
  std::size_t count() const { return count_; }
  std::size_t batches() const { return batch_means_.size(); }

 private:
  std::size_t batch_size_;
  std::size_t count_ = 0;
  double total_ = 0.0;
  double current_ = 0.0;
  std::size_t in_batch_ = 0;
  std::vector<double> batch_means_;
};

// Streaming observables for long runs that cannot keep the trajectory:
// mean squared (wrapped) neighbour difference and the correlation
// <exp(i(theta_{m-k} - theta_m))> for k = 0..max_k, each with a standard error.
class LatticeStatistics {
 public:
  LatticeStatistics(int max_k, std::size_t batch_size);

  void add(const LatticeState& state);

  int max_k() const { return max_k_; }
  const BatchedMean& bond_square() const { return bond_square_; }
  const BatchedMean& correlation_re(int k) const { return corr_re_.at(k); }
  const BatchedMean& correlation_im(int k) const { return corr_im_.at(k); }
  const BatchedMean& energy() const { return energy_; }
  std::size_t samples() const { return bond_square_.count(); }

  // Only used for the energy trace; optional.
  void set_config(const LatticeConfig& config) { config_ = config; has_config_ = true; }

 private:
  int max_k_;
  BatchedMean bond_square_;
  std::vector<BatchedMean> corr_re_;
  std::vector<BatchedMean> corr_im_;
  BatchedMean energy_;
  LatticeConfig config_;
  bool has_config_ = false;
};

struct LangevinRun {
  std::size_t steps = 10'000'000;
  std::size_t burn_in = 0;       // 0 -> config.default_burn_in()
  std::size_t sample_every = 100;
};

// Integrates from the uniform state, discards the burn-in and feeds every
// `sample_every`-th state to `observer`.
LatticeState run_langevin(const LatticeConfig& config, const LangevinRun& run,
                          const std::function<void(const LatticeState&)>& observer);

}  // namespace mlock::lattice
