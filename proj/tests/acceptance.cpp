#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mlock/adler_sync.hpp"
#include "mlock/combmath.hpp"
#include "mlock/phase_lattice.hpp"
#include "mlock/pulse_shaping.hpp"
#include "mlock/runner.hpp"
#include "mlock/thermomech.hpp"

using namespace mlock;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0) o.require(secs < budget_s, fmt("runtime %.2f s < %.0f s", secs, budget_s));
  if (!o.pass) ++failures;
  std::printf("%s %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("INFO    %s\n", text.c_str());
  std::fflush(stdout);
}

// Criterion 1
Outcome comb_identity() {
  Outcome o;
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> us(-20.0, 20.0), ub(0.01, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = us(g), beta = ub(g);
    worst = std::max(worst, std::abs(combmath::comb_series_adaptive(s, beta) - combmath::comb_closed(s, beta)));
  }
  o.require(worst <= 1e-12, fmt("max |series - closed| = %.2e <= 1e-12", worst));
  double worst_mean = 0.0;
  for (double beta : {0.01, 0.1, 1.0, 3.0}) {
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += combmath::comb_closed(kTwoPi * i / n, beta);
    worst_mean = std::max(worst_mean, std::abs(sum / n - 1.0));
  }
  o.require(worst_mean <= 1e-8, fmt("max |period mean - 1| = %.2e <= 1e-8", worst_mean));
  return o;
}

// Criterion 2
Outcome gibbs_steady_state() {
  Outcome o;
  lattice::LatticeConfig c;
  c.n_modes = 64;
  c.mu_m = 1.0;
  c.t_n = 0.2;
  c.dt = 1e-3;
  c.seed = 2;
  const double beta = c.beta_n();
  lattice::LatticeStatistics st(10, 100);
  lattice::LangevinRun run;
  run.steps = 10'000'000;
  run.sample_every = 100;
  lattice::run_langevin(c, run, [&](const lattice::LatticeState& s) { st.add(s); });

  sde::RngStream rng(3);
  lattice::BatchedMean gibbs_sq(100);
  std::vector<lattice::BatchedMean> gibbs_corr(11, lattice::BatchedMean(100));
  std::vector<lattice::BatchedMean> vm_corr(11, lattice::BatchedMean(100));
  lattice::BatchedMean vm_sq(100);
  for (int i = 0; i < 20000; ++i) {
    const auto a = lattice::sample_gibbs(beta, 64, rng);
    const auto b = lattice::sample_gibbs(beta, 64, rng, lattice::GibbsLaw::von_mises);
    double sa = 0.0, sb = 0.0;
    for (int m = 1; m < 64; ++m) {
      sa += std::pow(a.theta[m - 1] - a.theta[m], 2);
      sb += std::pow(lattice::wrap_phase(b.theta[m - 1] - b.theta[m]), 2);
    }
    gibbs_sq.add(sa / 63.0);
    vm_sq.add(sb / 63.0);
    for (int k = 1; k <= 10; ++k) {
      double ca = 0.0, cb = 0.0;
      for (int m = k; m < 64; ++m) {
        ca += std::cos(a.theta[m - k] - a.theta[m]);
        cb += std::cos(b.theta[m - k] - b.theta[m]);
      }
      gibbs_corr[k].add(ca / (64 - k));
      vm_corr[k].add(cb / (64 - k));
    }
  }

  const double sq = st.bond_square().mean();
  o.require(std::abs(sq / (2.0 * beta) - 1.0) <= 0.05,
            fmt("<dtheta^2> = %.5f vs 0.2 (rel %.3f, tol 0.05)", sq, sq / (2.0 * beta) - 1.0));
  int bad = 0;
  double worst_z = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double se = std::hypot(st.correlation_re(k).standard_error(), gibbs_corr[k].standard_error());
    const double z = std::abs(st.correlation_re(k).mean() - gibbs_corr[k].mean()) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++bad;
  }
  o.require(bad == 0, fmt("correlations vs Gaussian sample_gibbs: %.0f of 10 lags beyond 3 SE (max %.1f SE)",
                          bad, worst_z));
  info(fmt("2: Gaussian oracle: <dtheta^2> = %.5f, C(1) = %.5f vs Langevin C(1) = %.5f", gibbs_sq.mean(),
           gibbs_corr[1].mean(), st.correlation_re(1).mean()));

  int vm_bad = 0;
  double vm_worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double se = std::hypot(st.correlation_re(k).standard_error(), vm_corr[k].standard_error());
    const double z = std::abs(st.correlation_re(k).mean() - vm_corr[k].mean()) / se;
    vm_worst = std::max(vm_worst, z);
    if (z > 3.0) ++vm_bad;
  }
  info(fmt("2: exact open-chain law: <dtheta^2> = %.5f (Langevin %.5f, %.1f SE)", lattice::open_chain_bond_square(beta),
           sq, std::abs(sq - lattice::open_chain_bond_square(beta)) / st.bond_square().standard_error()));
  info(fmt("2: von Mises sample_gibbs: %.0f of 10 lags beyond 3 SE (max %.1f SE), <dtheta^2> = %.5f", vm_bad,
           vm_worst, vm_sq.mean()));
  return o;
}

// Criterion 3
Outcome comb_limit() {
  Outcome o;
  const double beta = 0.1;
  const int n = 64;
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(kPi * i / 40.0);
  for (double s : {0.02, 0.05, 0.1, 0.15}) grid.push_back(s);
  std::vector<lattice::BatchedMean> w(grid.size(), lattice::BatchedMean(1));
  sde::RngStream rng(4);
  const auto amps = lattice::ModeAmplitudes::uniform(n);
  for (int i = 0; i < 1000; ++i) {
    const auto v = lattice::intensity_waveform(lattice::sample_gibbs(beta, n, rng), amps, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) w[j].add(v[j]);
  }
  int bad = 0, bad_finite = 0;
  double worst = 0.0, worst_finite = 0.0, peak_closed = 0.0, peak_mc = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double se = w[j].standard_error();
    const double z = std::abs(w[j].mean() - combmath::comb_closed(grid[j], beta)) / se;
    const double zf = std::abs(w[j].mean() - combmath::comb_finite(grid[j], beta, n)) / se;
    if (z > 3.0) ++bad;
    if (zf > 3.0) ++bad_finite;
    worst = std::max(worst, z);
    worst_finite = std::max(worst_finite, zf);
    if (grid[j] == 0.0) {
      peak_closed = combmath::comb_closed(0.0, beta);
      peak_mc = w[j].mean();
    }
  }
  o.require(bad == 0, fmt("%.0f of %.0f points beyond 3 SE of comb_closed (max %.1f SE)", bad,
                          static_cast<double>(grid.size()), worst));
  info(fmt("3: peak: ensemble %.3f, comb_closed %.3f, comb_finite %.3f", peak_mc, peak_closed,
           combmath::comb_finite(0.0, beta, n)));
  info(fmt("3: against comb_finite(N = 64): %.0f points beyond 3 SE (max %.1f SE)", bad_finite, worst_finite));
  return o;
}

double max_relative_deviation(double g_m) {
  const int n = static_cast<int>(5.0 / g_m);
  const auto traj = pulse::roundtrip_iterate(0.0, g_m, n);
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double ref = g_m * std::tanh(g_m * i);
    worst = std::max(worst, std::abs(traj[i] - ref) / ref);
  }
  return worst;
}

// Criterion 4
Outcome pulse_convergence() {
  Outcome o;
  const double d2 = max_relative_deviation(1e-2), d3 = max_relative_deviation(1e-3),
               d4 = max_relative_deviation(1e-4);
  o.require(d3 <= 1e-3, fmt("g_m = 1e-3: max relative deviation %.2e <= 1e-3", d3));
  const double r1 = d2 / d3, r2 = d3 / d4;
  o.require(std::abs(r1 / 10.0 - 1.0) <= 0.1 && std::abs(r2 / 10.0 - 1.0) <= 0.1,
            fmt("O(g_m): deviations %.2e, %.2e, %.2e", d2, d3, d4) + fmt(", ratios %.3f, %.3f (10 +- 10%%)", r1, r2));
  return o;
}

// Criterion 5
Outcome composite_coefficients() {
  Outcome o;
  // Dyadic inputs keep every product exact, so the coefficients must agree bit for bit.
  int exact_bad = 0, exact_n = 0;
  for (int p = -3; p <= 3; ++p) {
    for (int q = -3; q <= 3; ++q) {
      for (int j = -8; j <= 8; ++j) {
        const pulse::cplx gf(std::ldexp(1.0, p), 0.0), gt(j * 0.125, q * 0.25);
        const pulse::cplx gm2 = gt / gf;
        const auto e = pulse::compose(pulse::element_time_like(gt), pulse::element_freq_like(gf));
        ++exact_n;
        if (e.a != 1.0 + gm2 || e.b != 1.0 / gf || e.c != gf * gm2 || e.d != 1.0) ++exact_bad;
      }
    }
  }
  o.require(exact_bad == 0, fmt("dyadic inputs: %.0f of %.0f differ from (1 + g_m^2, 1/gamma_F, gamma_F g_m^2, 1)",
                                exact_bad, exact_n));

  int bad = 0;
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.1, 3.0);
  const double tol = 8.0 * std::numeric_limits<double>::epsilon();
  for (int trial = 0; trial < 1000; ++trial) {
    const pulse::cplx gt(u(g), u(g)), gf(pos(g), u(g));
    const pulse::cplx gm2 = gt / gf;
    const auto e = pulse::compose(pulse::element_time_like(gt), pulse::element_freq_like(gf));
    if (std::abs(e.a - (1.0 + gm2)) > tol * (1.0 + std::abs(gm2)) || e.b != 1.0 / gf ||
        std::abs(e.c - gf * gm2) > tol * std::abs(gt) || e.d != 1.0) {
      ++bad;
    }
  }
  o.require(bad == 0, fmt("random complex inputs: %.0f of 1000 beyond rounding", bad));
  return o;
}

adler::AdlerParams adler_params(double v_am) {
  const double carrier = kTwoPi * 2048.0;
  return adler::AdlerParams::from_threshold(carrier, carrier - kTwoPi * 100.0, 0.156, v_am);
}

// Criterion 6
Outcome adler_locking() {
  Outcome o;
  int wrong = 0, grid = 0;
  for (int step = -60; step <= 60; ++step) {
    const double i_b = step / 20.0;
    for (double phi0 : {-2.0, 0.0, 2.5}) {
      const auto tr = adler::integrate_adler(i_b, phi0, 2000.0, 0.01, 100);
      const bool locked = std::abs(tr.phi.back() - tr.phi[tr.size() / 2]) < kPi;
      ++grid;
      if (locked != (std::abs(i_b) <= 1.0)) ++wrong;
    }
  }
  o.require(wrong == 0, fmt("locking misclassified on %.0f of %.0f grid points", wrong, grid));

  double worst_slope = 0.0;
  for (double i_b : {1.05, 1.2, 1.5, 2.0, 3.0, 5.0, -2.0}) {
    const double beat = adler::beat_frequency(i_b);
    const double period = kTwoPi / beat;
    const auto tr = adler::integrate_adler(i_b, 0.0, 110.0 * period, 0.005, 20);
    std::size_t i = 0;
    while (tr.tau[i] < 10.0 * period) ++i;
    const double slope = std::abs(tr.phi.back() - tr.phi[i]) / (tr.tau.back() - tr.tau[i]);
    worst_slope = std::max(worst_slope, std::abs(slope / beat - 1.0));
  }
  o.require(worst_slope <= 1e-3, fmt("mean slope vs sqrt(i_b^2 - 1): max rel %.2e <= 1e-3", worst_slope));

  const auto tr = adler::integrate_adler(2.0, adler::closed_form_origin_phase(2.0), 30.0, 0.001);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    worst = std::max(worst, std::abs(adler::adler_velocity(2.0, tr.phi[k]) - adler::unlocked_closed_form(2.0, tr.tau[k])));
  }
  o.require(worst <= 1e-3, fmt("closed form vs ODE at i_b = 2: max %.2e <= 1e-3", worst));

  adler::SweepOptions opt;
  opt.segment_len = 32768;
  const double fs = 131072.0;
  for (double i_b : {2.0, 1.5, 3.0}) {
    const auto p = adler_params(0.156 / i_b);
    const auto ds = adler::detector_spectrum(p, 4.0, fs, opt);
    const double beat_hz = p.zeta_am * p.v_am * std::sqrt(i_b * i_b - 1.0) / kTwoPi;
    const auto main = adler::strongest_line(ds.spectrum, 2048.0 - 2.5 * beat_hz, 2048.0 + 2.5 * beat_hz);
    const auto ladder = adler::sideband_ladder(ds.spectrum, main.freq_hz, beat_hz, 2);
    const double spacing = 0.5 * (ladder.at(1).freq_hz - ladder.at(-1).freq_hz);
    const double expected = std::exp(-std::acosh(i_b));
    const double r10 = ladder.amplitude_ratio(1, 0), r21 = ladder.amplitude_ratio(2, 1);
    o.require(std::abs(spacing - beat_hz) <= ds.spectrum.resolution,
              fmt("i_b = %.1f: spacing %.2f Hz vs %.2f Hz", i_b, spacing, beat_hz) +
                  fmt(" (bin %.2f Hz)", ds.spectrum.resolution));
    o.require(std::abs(r10 / expected - 1.0) <= 0.1 && std::abs(r21 / expected - 1.0) <= 0.1,
              fmt("ratios %.4f, %.4f vs exp(-beta_b) = %.4f", r10, r21, expected));
  }
  return o;
}

// Criterion 7
Outcome calibration() {
  Outcome o;
  const auto p = adler_params(0.156);
  o.require(std::abs(p.zeta_am - 4027.7) < 0.05, fmt("zeta_AM = %.4f rad/(s V) vs 4027.7", p.zeta_am));
  double worst = 0.0;
  for (double v = 0.01; v <= 1.0; v += 0.0037) {
    worst = std::max(worst, std::abs(adler::normalized_bias(adler_params(v)) / (0.156 / v) - 1.0));
  }
  o.require(worst <= 4.0 * std::numeric_limits<double>::epsilon(),
            fmt("i_b vs V_AM0 / V_AM: max rel %.1e (rounding only)", worst));
  return o;
}

struct MirrorCase {
  thermo::MechParams mech;
  thermo::AbsorptionModel abs;
  thermo::IntensityDrive drive;
};

MirrorCase random_case(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MirrorCase c;
  c.mech.m_m = 0.5 + 1.5 * u(g);
  c.mech.omega_m = 0.5 + 1.5 * u(g);
  c.mech.gamma_m = (1e-3 + 3e-3 * u(g)) * c.mech.omega_m;
  c.mech.kappa_m = (0.005 + 0.3 * u(g)) * c.mech.omega_m;
  c.mech.theta_fh = -(0.5 + 1.5 * u(g));
  c.mech.theta_ph = -0.05 * u(g) * c.mech.omega_m;
  const double f = u(g) < 0.3 ? -(1.3 + 0.4 * u(g)) : -0.7 + 2.7 * u(g);
  c.abs.a_h0 = 1.0;
  c.abs.k_a1 = (0.5 + 1.5 * u(g)) * (f > 0.0 ? -1.0 : 1.0);
  c.abs.k_a2 = (u(g) - 0.5) * c.abs.k_a1 * c.abs.k_a1;
  c.drive.l0 = std::abs(f) * c.mech.gamma_m / std::abs(thermo::gamma_h0(c.mech, c.abs, 1.0));
  return c;
}

thermo::MechParams unit_mech() {
  thermo::MechParams m;
  m.m_m = 1.0;
  m.omega_m = 1.0;
  m.gamma_m = 1e-3;
  m.theta_fh = -1.0;
  m.theta_ph = 0.0;
  m.kappa_m = 0.01;
  return m;
}

// Criterion 8
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 g(8);
  double worst_gamma = 0.0, worst_omega = 0.0;
  int growing = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const MirrorCase c = random_case(g);
    auto r = thermo::linear_response_oracle(c.mech, c.abs, c.drive, c.mech.omega_m);
    r = thermo::linear_response_oracle(c.mech, c.abs, c.drive, c.mech.omega_m + r.delta_omega);
    const double gamma = c.mech.gamma_m + r.delta_gamma;
    const double omega_prime = c.mech.omega_m + r.delta_omega;
    const double omega = std::sqrt(omega_prime * omega_prime - gamma * gamma);
    thermo::ProbeSettings ps;
    ps.decay_lengths = 3.0;
    const auto fit = thermo::probe_growth(c.mech, c.abs, c.drive, ps);
    worst_gamma = std::max(worst_gamma, std::abs(fit.gamma / gamma - 1.0));
    worst_omega = std::max(worst_omega, std::abs(fit.omega / omega - 1.0));
    if (gamma < 0.0) ++growing;
  }
  o.require(worst_gamma <= 0.02, fmt("20 sets (%.0f growing): damping max rel %.2e <= 0.02", growing, worst_gamma));
  o.require(worst_omega <= 1e-4, fmt("frequency max rel %.2e <= 1e-4", worst_omega));

  const thermo::AbsorptionModel a{1.0, 3.0, 0.0};
  const double l0 = 2e-4;
  std::vector<double> dev;
  bool same_sign = true, order = true;
  for (double ratio : {0.1, 0.01, 0.001}) {
    auto m = unit_mech();
    m.kappa_m = ratio * m.omega_m;
    const double h0 = thermo::gamma_h0(m, a, l0);
    const auto r = thermo::linear_response_oracle(m, a, l0, m.omega_m);
    const double d = std::abs(std::abs(r.delta_gamma) / std::abs(h0) - 1.0);
    same_sign = same_sign && r.delta_gamma * h0 > 0.0;
    order = order && d <= 2.0 * ratio * ratio;
    dev.push_back(d);
  }
  const double s1 = dev[0] / dev[1], s2 = dev[1] / dev[2];
  o.require(order && std::abs(s1 / 100.0 - 1.0) < 0.05 && std::abs(s2 / 100.0 - 1.0) < 0.05 && same_sign,
            fmt("small kappa: |dgamma|/|gamma_H0| - 1 = %.2e, %.2e, %.2e", dev[0], dev[1], dev[2]) +
                fmt(" at kappa/omega = 0.1, 0.01, 0.001 (steps %.1f, %.1f)", s1, s2));
  return o;
}

// Criterion 9
Outcome threshold_bracketing() {
  Outcome o;
  const auto m = unit_mech();
  const thermo::AbsorptionModel red{1.0, 4.0, 0.0}, blue{1.0, -4.0, 0.0};
  const double t_n = 2.0 * m.omega_m / 40025.0;
  thermo::IntensityDrive seo, mml;
  const double formula_seo = thermo::seo_threshold(m, red).value();
  const double formula_mml = thermo::mml_threshold(m, blue, t_n).value();
  mml.mode = thermo::ClosedLoopDrive{thermo::mml_coupling(m, blue), t_n};
  for (double factor : {0.95, 1.05}) {
    seo.l0 = factor * formula_seo;
    mml.l0 = factor * formula_mml;
    const double gs = thermo::probe_growth(m, red, seo).gamma;
    const double gm = thermo::probe_growth(m, blue, mml).gamma;
    const bool want_growth = factor > 1.0;
    o.require((gs < 0.0) == want_growth, fmt("SEO at %.2f L*: gamma = %+.3e", factor, gs));
    o.require((gm < 0.0) == want_growth, fmt("MML at %.2f L*: gamma = %+.3e", factor, gm));
  }
  return o;
}

// Criterion 10
Outcome noise_chain() {
  Outcome o;
  thermo::NoiseChain c;
  const double omega = kTwoPi * 368.2e3;
  c.gamma_om = 0.1 * omega;
  c.omega_p = kTwoPi * 299792458.0 / c.lambda_l;
  const auto d = thermo::effective_noise(c);
  o.require(std::abs(d.alpha_nf - 2.498) < 5e-4, fmt("alpha_NF = %.7f vs 2.498", d.alpha_nf));
  const double ratio = 2.0 * omega / d.t_n;
  o.require(std::abs(ratio / 4e4 - 1.0) <= 0.25, fmt("2 omega_m / T_N = %.1f vs 4e4 (25%%)", ratio));
  o.require(std::abs(d.n_r - 4.61e4) < 50.0, fmt("N_R = %.1f vs 4.61e4", d.n_r));
  auto m = unit_mech();
  m.omega_m = omega;
  m.gamma_m = omega / 2e4;
  m.kappa_m = 0.01 * omega;
  const double mml = thermo::mml_threshold(m, {1.0, -4.0, 0.0}, d.t_n).value();
  const double seo = thermo::seo_threshold(m, {1.0, 4.0, 0.0}).value();
  o.require(std::abs(mml / seo / 2.5e-5 - 1.0) <= 0.25,
            fmt("MML / SEO threshold = %.4e vs T_N / 2 omega_m = %.4e (2.5e-5, 25%%)", mml / seo, d.t_n / (2.0 * omega)));
  return o;
}

// Criterion 11
Outcome detuning_phenomenology() {
  Outcome o;
  const auto suite = cli::parse_config(cli::paper_preset());
  std::optional<cli::Params> seo_p, mml_p;
  for (const auto& e : suite.experiments) {
    if (e.experiment == "seo") seo_p = e.params;
    if (e.experiment == "mml") mml_p = e.params;
  }
  const cli::Params& p = mml_p.value();
  thermo::MechParams m;
  m.m_m = p.real("m_m");
  m.omega_m = p.real("omega_m");
  m.gamma_m = m.omega_m / (2.0 * p.real("q_factor"));
  m.theta_ph = p.real("theta_ph");
  m.theta_fh = p.real("theta_fh");
  m.kappa_m = p.real("kappa_ratio") * m.omega_m;
  m.validate(true);
  o.require(m.theta_fh < 0.0 && m.theta_ph < 0.0, fmt("preset Theta_FH = %.1e, Theta_PH = %.1e", m.theta_fh, m.theta_ph));
  thermo::NoiseChain chain;
  chain.g_oa = p.real("g_oa");
  chain.n_pi = p.real("n_pi");
  chain.n_p = p.real("n_p");
  chain.gamma_om = p.real("gamma_om_ratio") * p.real("omega_r");
  chain.omega_p = kTwoPi * 299792458.0 / chain.lambda_l;
  const double t_n = thermo::effective_noise(chain).t_n;
  const double k_mag = std::abs(p.real("k_a1"));
  const double a_h0 = p.real("a_h0");

  bool formulas = true;
  for (double scale : {0.01, 1.0, 100.0}) {
    const thermo::AbsorptionModel red{a_h0, scale * k_mag, 0.0}, blue{a_h0, -scale * k_mag, 0.0};
    formulas = formulas && thermo::seo_threshold(m, red).has_value() && !thermo::seo_threshold(m, blue).has_value() &&
               thermo::mml_threshold(m, blue, t_n).has_value() && !thermo::mml_threshold(m, red, t_n).has_value();
  }
  o.require(formulas, "closed forms: SEO only for k_A1 > 0, MML only for k_A1 < 0");

  const thermo::AbsorptionModel red{a_h0, k_mag, 0.0}, blue{a_h0, -k_mag, 0.0};
  thermo::IntensityDrive cw;
  cw.l0 = 1.5 * thermo::seo_threshold(m, red).value();
  const double seo_red = thermo::probe_growth(m, red, cw).gamma;
  const double seo_blue = thermo::probe_growth(m, blue, cw).gamma;
  o.require(seo_red < 0.0 && seo_blue > 0.0,
            fmt("cw at 1.5 L*_SEO: gamma red %+.3e, blue %+.3e", seo_red, seo_blue));
  thermo::IntensityDrive loop;
  loop.l0 = 1.5 * thermo::mml_threshold(m, blue, t_n).value();
  loop.mode = thermo::ClosedLoopDrive{thermo::mml_coupling(m, blue), t_n};
  const double mml_blue = thermo::probe_growth(m, blue, loop).gamma;
  const double mml_red = thermo::probe_growth(m, red, loop).gamma;
  o.require(mml_blue < 0.0 && mml_red > 0.0,
            fmt("closed loop at 1.5 L*_MML: gamma blue %+.3e, red %+.3e", mml_blue, mml_red));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Criterion 12
Outcome reproducibility() {
  Outcome o;
  cli::json preset = cli::paper_preset();
  for (auto& e : preset["experiments"]) {
    if (e["experiment"] == "lattice") {
      e["parameters"]["steps"] = 200000;
      e["parameters"]["gibbs_samples"] = 200;
    }
  }
  const fs::path root = fs::temp_directory_path() / ("mlock_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::vector<cli::json>> manifests;
  for (const char* run : {"a", "b"}) {
    cli::RunOptions opt;
    opt.out_dir = (root / run).string();
    manifests.push_back(cli::run_suite(cli::parse_config(preset), opt));
  }
  int files = 0, differ = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    ++files;
    if (slurp(entry.path()) != slurp(root / "b" / rel)) ++differ;
  }
  o.require(files > 0 && differ == 0,
            fmt("%.0f experiments, %.0f tables, %.0f differ byte-wise between reruns",
                static_cast<double>(manifests[0].size()), files, differ));
  int manifest_differ = 0;
  for (std::size_t i = 0; i < manifests[0].size(); ++i) {
    cli::json a = manifests[0][i], b = manifests[1][i];
    a.erase("timestamp");
    b.erase("timestamp");
    if (a != b) ++manifest_differ;
  }
  o.require(manifest_differ == 0, fmt("%.0f manifests differ apart from the timestamp", manifest_differ));
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  criterion(1, "comb identity", 1.0, comb_identity);
  criterion(2, "Gibbs steady state", 120.0, gibbs_steady_state);
  criterion(3, "comb limit of the lattice", 60.0, comb_limit);
  criterion(4, "pulse convergence", 10.0, pulse_convergence);
  criterion(5, "composite coefficients", 0.0, composite_coefficients);
  criterion(6, "Adler locking", 60.0, adler_locking);
  criterion(7, "calibration chain", 0.0, calibration);
  criterion(8, "bolometric oracle equivalence", 300.0, oracle_equivalence);
  criterion(9, "threshold bracketing", 300.0, threshold_bracketing);
  criterion(10, "noise-chain numbers", 1.0, noise_chain);
  criterion(11, "detuning phenomenology", 0.0, detuning_phenomenology);
  criterion(12, "reproducibility", 0.0, reproducibility);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
