#include "mlock/thermomech.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "mlock/combmath.hpp"
#include "mlock/sde_engine.hpp"

namespace mlock::thermo {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double x_of_t(const MechParams& mech, double t_r) {
  const double w = mech.omega_m + mech.theta_ph * t_r;
  return mech.theta_fh * t_r / (mech.m_m * w * w);
}

// +1 when the absorption minimum of a mirror swing lies at dx > 0.
double min_side(const AbsorptionModel& abs) { return abs.k_a1 > 0.0 ? -1.0 : 1.0; }

struct LinearCoeffs {
  double omega_p;  // omega_m + Theta_PH T_s
  double c_t;      // force per unit temperature, per unit mass
  double h_x;      // heating per unit displacement
  double h_v;      // heating per unit velocity
};

LinearCoeffs linearise(const MechParams& mech, const AbsorptionModel& abs,
                       const IntensityDrive& drive) {
  if (std::holds_alternative<CombDrive>(drive.mode)) {
    throw UnsupportedError("linear response: comb drive is time-periodic, no stationary linearisation");
  }
  const StaticEquilibrium eq = static_equilibrium(mech, abs, drive.l0);
  LinearCoeffs c{};
  c.omega_p = mech.omega_m + mech.theta_ph * eq.t_r;
  c.c_t = mech.theta_fh / mech.m_m - 2.0 * c.omega_p * mech.theta_ph * eq.x;
  c.h_x = drive.l0 * abs.a_h0 * (abs.k_a1 + 2.0 * abs.k_a2 * eq.x);
  c.h_v = 0.0;
  if (const auto* cl = std::get_if<ClosedLoopDrive>(&drive.mode)) {
    const double gain = drive.l0 * abs(eq.x) * cl->coupling / cl->t_n * min_side(abs);
    c.h_x += gain * std::cos(cl->phase_offset);
    c.h_v += gain * std::sin(cl->phase_offset) / mech.omega_m;
  }
  return c;
}

}  // namespace

void MechParams::validate(bool aluminum_device) const {
  if (!finite_all({m_m, omega_m, gamma_m, theta_ph, theta_fh, kappa_m})) {
    throw DomainError("MechParams: non-finite value");
  }
  if (!(m_m > 0.0)) throw DomainError("MechParams: m_m must be positive");
  if (!(omega_m > 0.0)) throw DomainError("MechParams: omega_m must be positive");
  if (!(gamma_m >= 0.0 && gamma_m < 0.1 * omega_m)) {
    throw DomainError("MechParams: need 0 <= gamma_m < 0.1 omega_m");
  }
  if (!(kappa_m > 0.0)) throw DomainError("MechParams: kappa_m must be positive");
  if (aluminum_device && !(theta_fh < 0.0 && theta_ph < 0.0)) {
    throw DomainError("MechParams: aluminum device requires Theta_FH < 0 and Theta_PH < 0");
  }
}

void AbsorptionModel::validate() const {
  if (!finite_all({a_h0, k_a1, k_a2})) throw DomainError("AbsorptionModel: non-finite value");
  if (!(a_h0 > 0.0)) throw DomainError("AbsorptionModel: a_h0 must be positive");
}

void IntensityDrive::validate() const {
  if (!(std::isfinite(l0) && l0 >= 0.0)) throw DomainError("IntensityDrive: l0 must be >= 0");
  if (const auto* c = std::get_if<CombDrive>(&mode)) {
    if (!(c->beta >= combmath::kMinBeta)) throw DomainError("CombDrive: beta too small");
    if (!(c->omega_pulse > 0.0)) throw DomainError("CombDrive: omega_pulse must be positive");
  }
  if (const auto* c = std::get_if<ClosedLoopDrive>(&mode)) {
    if (!(c->coupling >= 0.0)) throw DomainError("ClosedLoopDrive: coupling must be >= 0");
    if (!(c->t_n > 0.0)) throw DomainError("ClosedLoopDrive: t_n must be positive");
    if (!(c->beta_floor > 0.0)) throw DomainError("ClosedLoopDrive: beta_floor must be positive");
  }
}

double bessel_ratio(double kappa) {
  if (kappa < 0.0) return -bessel_ratio(-kappa);
  if (kappa < 1e-8) return 0.5 * kappa;
  if (kappa > 500.0) {
    const double r = 1.0 / kappa;
    return 1.0 - 0.5 * r - 0.125 * r * r - 0.125 * r * r * r;
  }
  return std::cyl_bessel_i(1.0, kappa) / std::cyl_bessel_i(0.0, kappa);
}

void NoiseChain::validate() const {
  if (!(g_oa > 1.0)) throw DomainError("NoiseChain: g_oa must be > 1");
  if (!(n_pi >= 1.0)) throw DomainError("NoiseChain: n_pi must be >= 1");
  if (!(gamma_om >= 0.0)) throw DomainError("NoiseChain: gamma_om must be >= 0");
  if (!(n_p > 0.0 && lambda_l > 0.0 && delta_lambda > 0.0 && l_r > 0.0 && n_eff > 0.0)) {
    throw DomainError("NoiseChain: n_p, wavelengths, l_r and n_eff must be positive");
  }
}

StaticEquilibrium static_equilibrium(const MechParams& mech, const AbsorptionModel& abs,
                                     double l0) {
  if (l0 == 0.0) return {};
  const auto g = [&](double t) { return mech.kappa_m * t - l0 * abs(x_of_t(mech, t)); };
  double t = l0 * abs.a_h0 / mech.kappa_m;
  for (int it = 0; it < 100; ++it) {
    const double h = 1e-7 * std::max(std::abs(t), 1e-30);
    const double gt = g(t);
    const double d = (g(t + h) - g(t - h)) / (2.0 * h);
    if (!(d != 0.0) || !std::isfinite(d)) break;
    const double step = gt / d;
    t -= step;
    if (std::abs(step) <= 1e-15 * std::abs(t)) {
      return {x_of_t(mech, t), t};
    }
  }
  if (std::isfinite(t) && std::abs(g(t)) <= 1e-10 * mech.kappa_m * std::abs(t)) {
    return {x_of_t(mech, t), t};
  }
  throw InstabilityError("static_equilibrium: no rest point (thermal runaway)");
}

MirrorTrajectory simulate(const MechParams& mech, const AbsorptionModel& abs,
                          const IntensityDrive& drive, double x0, double v0, double t_end,
                          double dt, const SimulationOptions& options) {
  mech.validate();
  abs.validate();
  drive.validate();
  if (!(t_end > 0.0)) throw DomainError("simulate: t_end must be positive");
  if (!(dt > 0.0 && dt <= 2.0 * kPi / (50.0 * mech.omega_m))) {
    throw DomainError("simulate: dt must be in (0, 2 pi / (50 omega_m)]");
  }
  const std::size_t down = std::max<std::size_t>(1, options.downsample);

  const StaticEquilibrium eq = static_equilibrium(mech, abs, drive.l0);
  const double w = mech.omega_m;
  const double x_ref = abs.k_a1 != 0.0 ? 0.1 / std::abs(abs.k_a1) : 1e-9;
  const double t_ref = mech.theta_fh != 0.0 ? mech.m_m * w * w * x_ref / std::abs(mech.theta_fh) : 1.0;
  const double g2 = 2.0 * mech.gamma_m / w;
  const double ph = mech.theta_ph * t_ref / w;
  const double f_t = mech.theta_fh * t_ref / (mech.m_m * w * w * x_ref);
  const double heat = 1.0 / (w * t_ref);
  const double cool = mech.kappa_m / w;

  const auto intensity = [&](double t, double x, double v) {
    return std::visit(
        [&](const auto& mode) -> double {
          using M = std::decay_t<decltype(mode)>;
          if constexpr (std::is_same_v<M, CwDrive>) {
            return drive.l0;
          } else if constexpr (std::is_same_v<M, CombDrive>) {
            return drive.l0 * combmath::comb_closed(mode.omega_pulse * t + mode.phase, mode.beta);
          } else {
            const double dx = x - eq.x;
            const double q = v / w;
            const double a = std::hypot(dx, q);
            if (a == 0.0 || mode.coupling == 0.0) return drive.l0;
            const double rho = std::min(bessel_ratio(mode.coupling * a / mode.t_n),
                                        std::exp(-mode.beta_floor));
            // Mirror phase psi with dx = a cos psi, q = -a sin psi, measured from
            // the absorption minimum.
            const double sgn = min_side(abs);
            const double c = sgn * dx / a;
            const double s = -sgn * q / a;
            const double cs = c * std::cos(mode.phase_offset) - s * std::sin(mode.phase_offset);
            return drive.l0 * (1.0 - rho) * (1.0 + rho) /
                   ((1.0 - rho) * (1.0 - rho) + 2.0 * rho * (1.0 - cs));
          }
        },
        drive.mode);
  };

  using State = std::array<double, 3>;  // xi, eta, theta
  const auto rhs = [&](double tau, const State& y) {
    const double x = x_ref * y[0];
    const double v = w * x_ref * y[1];
    const double l = intensity(tau / w, x, v);
    const double wf = 1.0 + ph * y[2];
    return State{y[1], -g2 * y[1] - wf * wf * y[0] + f_t * y[2],
                 heat * l * abs(x) - cool * y[2]};
  };

  MirrorTrajectory out;
  out.x_rest = eq.x;
  const double t0r = options.t_r0.value_or(eq.t_r);
  State y{x0 / x_ref, v0 / (w * x_ref), t0r / t_ref};
  const double dtau = w * dt;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const std::size_t cap = steps / down + 2;
  out.time.reserve(cap);
  out.x.reserve(cap);
  out.v.reserve(cap);
  out.t_r_rel.reserve(cap);
  out.intensity.reserve(cap);

  const auto record = [&](double t, const State& s) {
    const double x = x_ref * s[0];
    const double v = w * x_ref * s[1];
    out.time.push_back(t);
    out.x.push_back(x);
    out.v.push_back(v);
    out.t_r_rel.push_back(t_ref * s[2]);
    out.intensity.push_back(intensity(t, x, v));
  };
  if (!sde::all_finite(y)) throw DomainError("simulate: non-finite initial state");
  record(0.0, y);

  for (std::size_t i = 1; i <= steps; ++i) {
    const double tau = static_cast<double>(i - 1) * dtau;
    State next;
    try {
      next = sde::rk4_step(y, rhs, tau, dtau);
    } catch (const IntegrationError&) {
      next = State{NAN, NAN, NAN};
    }
    if (!sde::all_finite(next)) {
      throw MirrorInstability("simulate: non-finite state", tau / w, x_ref * y[0],
                              w * x_ref * y[1], t_ref * y[2]);
    }
    y = next;
    const double t = static_cast<double>(i) * dt;
    const bool out_of_range = abs.k_a1 != 0.0 && std::abs(abs.k_a1 * x_ref * y[0]) > 1.0;
    if (i % down == 0 || i == steps || out_of_range) record(t, y);
    if (out_of_range) {
      out.halted = true;
      out.halt_reason = "|k_A1 x| > 1 at t = " + std::to_string(t) +
                        " s; absorption expansion no longer valid";
      break;
    }
  }
  return out;
}

double theta_t(double kappa_m, double omega) { return std::atan2(kappa_m, omega); }

double gamma_h0(const MechParams& mech, const AbsorptionModel& abs, double l0) {
  return abs.k_a1 * mech.theta_fh * l0 * abs.a_h0 / (2.0 * mech.m_m * mech.omega_m * mech.omega_m);
}

double gamma_h1(const MechParams& mech, const AbsorptionModel& abs, double l0, double t_n) {
  if (!(t_n > 0.0)) throw DomainError("gamma_h1: t_n must be positive");
  return -(2.0 * mech.omega_m / t_n) * gamma_h0(mech, abs, l0);
}

EffectiveParams effective_params(const MechParams& mech, double gh0, double gh1) {
  EffectiveParams p;
  p.omega_eff = mech.omega_m + (mech.kappa_m / mech.omega_m) * (gh0 + gh1);
  p.gamma_eff = mech.gamma_m + gh0 + gh1;
  return p;
}

LinearResponse linear_response_oracle(const MechParams& mech, const AbsorptionModel& abs,
                                      double l0, double omega_drive) {
  IntensityDrive d;
  d.l0 = l0;
  return linear_response_oracle(mech, abs, d, omega_drive);
}

LinearResponse linear_response_oracle(const MechParams& mech, const AbsorptionModel& abs,
                                      const IntensityDrive& drive, double omega_drive) {
  if (!(omega_drive > 0.0)) throw DomainError("linear_response_oracle: omega must be positive");
  if (!(mech.kappa_m >= 0.0)) throw DomainError("linear_response_oracle: kappa_m must be >= 0");
  const LinearCoeffs c = linearise(mech, abs, drive);
  using cd = std::complex<double>;
  const cd iw(0.0, omega_drive);
  const cd h = (c.h_x + iw * c.h_v) / (mech.kappa_m + iw);
  const cd force = c.c_t * h;
  LinearResponse r;
  r.delta_gamma = -force.imag() / (2.0 * omega_drive);
  const double w2 = c.omega_p * c.omega_p - force.real();
  if (!(w2 > 0.0)) throw InstabilityError("linear_response_oracle: static instability (negative stiffness)");
  r.delta_omega = std::sqrt(w2) - mech.omega_m;
  return r;
}

ModeEstimate oracle_mode(const MechParams& mech, const AbsorptionModel& abs,
                         const IntensityDrive& drive) {
  const LinearCoeffs c = linearise(mech, abs, drive);
  using cd = std::complex<double>;
  const double a2 = 2.0 * mech.gamma_m + mech.kappa_m;
  const double a1 = c.omega_p * c.omega_p + 2.0 * mech.gamma_m * mech.kappa_m - c.c_t * c.h_v;
  const double a0 = c.omega_p * c.omega_p * mech.kappa_m - c.c_t * c.h_x;
  const auto p = [&](cd s) { return ((s + a2) * s + a1) * s + a0; };
  const auto dp = [&](cd s) { return (3.0 * s + 2.0 * a2) * s + a1; };
  cd s(-mech.gamma_m, c.omega_p);
  for (int it = 0; it < 100; ++it) {
    const cd step = p(s) / dp(s);
    s -= step;
    if (std::abs(step) <= 1e-15 * std::abs(s)) break;
  }
  if (!(std::abs(p(s)) <= 1e-9 * std::max(1.0, std::abs(s * s * s))) || !(s.imag() > 0.0)) {
    throw InstabilityError("oracle_mode: no oscillating root found");
  }
  return {s.imag(), -s.real()};
}

namespace {

struct Fit {
  double slope;
  double intercept;
};

Fit regress(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mt};
}

}  // namespace

ModeEstimate ringdown_extract(const MirrorTrajectory& traj, double t_start) {
  const std::size_t n = traj.size();
  if (traj.x.size() != n) throw DomainError("ringdown_extract: time/x length mismatch");
  std::size_t first = 0;
  while (first < n && traj.time[first] < t_start) ++first;

  std::vector<double> peak_t, peak_log;
  std::vector<double> zero_t, zero_idx;
  for (std::size_t i = first + 1; i + 1 < n; ++i) {
    const double ym = traj.x[i - 1] - traj.x_rest;
    const double y0 = traj.x[i] - traj.x_rest;
    const double yp = traj.x[i + 1] - traj.x_rest;
    const bool is_max = y0 > ym && y0 >= yp && y0 > 0.0;
    const bool is_min = y0 < ym && y0 <= yp && y0 < 0.0;
    if (is_max || is_min) {
      const double den = ym - 2.0 * y0 + yp;
      const double d = den != 0.0 ? 0.5 * (ym - yp) / den : 0.0;
      const double h = 0.5 * (traj.time[i + 1] - traj.time[i - 1]);
      const double val = y0 - 0.25 * (ym - yp) * d;
      peak_t.push_back(traj.time[i] + d * h);
      peak_log.push_back(std::log(std::abs(val)));
    }
  }
  for (std::size_t i = first; i + 1 < n; ++i) {
    const double y0 = traj.x[i] - traj.x_rest;
    const double y1 = traj.x[i + 1] - traj.x_rest;
    if ((y0 < 0.0 && y1 >= 0.0) || (y0 > 0.0 && y1 <= 0.0)) {
      const double t = traj.time[i] - y0 * (traj.time[i + 1] - traj.time[i]) / (y1 - y0);
      zero_t.push_back(t);
      zero_idx.push_back(static_cast<double>(zero_idx.size()));
    }
  }
  if (peak_t.size() < 5 || zero_t.size() < 4) {
    throw InsufficientDataError("ringdown_extract: fewer than 5 extrema in the record");
  }
  const Fit env = regress(peak_t, peak_log);
  const Fit zc = regress(zero_idx, zero_t);
  return {kPi / zc.slope, -env.slope};
}

std::optional<double> seo_threshold(const MechParams& mech, const AbsorptionModel& abs) {
  const double per_l = gamma_h0(mech, abs, 1.0);
  if (!(per_l < 0.0)) return std::nullopt;
  return -mech.gamma_m / per_l;
}

std::optional<double> mml_threshold(const MechParams& mech, const AbsorptionModel& abs,
                                    double t_n) {
  const double per_l = gamma_h0(mech, abs, 1.0) + gamma_h1(mech, abs, 1.0, t_n);
  if (!(per_l < 0.0)) return std::nullopt;
  return -mech.gamma_m / per_l;
}

double mml_coupling(const MechParams& mech, const AbsorptionModel& abs) {
  return 2.0 * mech.omega_m * std::abs(abs.k_a1);
}

double absorption_min_phase(const AbsorptionModel& abs, double x0_rel, double v0, double omega,
                            double omega_pulse) {
  if (!(omega > 0.0 && omega_pulse > 0.0)) {
    throw DomainError("absorption_min_phase: frequencies must be positive");
  }
  // x_rel = a cos(omega t + psi0); the minimum sits at psi = psi_min.
  const double psi0 = std::atan2(-v0 / omega, x0_rel);
  const double psi_min = abs.k_a1 > 0.0 ? kPi : 0.0;
  double dt = std::remainder(psi_min - psi0, 2.0 * kPi) / omega;
  if (dt < 0.0) dt += 2.0 * kPi / omega;
  return std::remainder(-omega_pulse * dt, 2.0 * kPi);
}

double noise_figure(double g_oa, double n_pi) {
  if (!(g_oa > 1.0)) throw DomainError("noise_figure: g_oa must be > 1");
  if (!(n_pi >= 1.0)) throw DomainError("noise_figure: n_pi must be >= 1");
  return 2.0 * n_pi * (g_oa - 1.0) / g_oa;
}

NoiseDerived effective_noise(const NoiseChain& chain) {
  chain.validate();
  NoiseDerived d;
  d.alpha_nf = noise_figure(chain.g_oa, chain.n_pi);
  d.t_n = chain.gamma_om * d.alpha_nf * chain.g_oa / (4.0 * chain.n_p);
  d.n_r = chain.l_r * chain.delta_lambda / (chain.lambda_l * chain.lambda_l);
  d.p_oa = chain.gamma_om * kHbar * chain.omega_p * d.n_r * chain.n_p;
  return d;
}

ModeEstimate probe_growth(const MechParams& mech, const AbsorptionModel& abs,
                          const IntensityDrive& drive, const ProbeSettings& settings) {
  const StaticEquilibrium eq = static_equilibrium(mech, abs, drive.l0);
  double dx = abs.k_a1 != 0.0 ? settings.relative_amplitude / std::abs(abs.k_a1) : 1e-9;
  if (const auto* cl = std::get_if<ClosedLoopDrive>(&drive.mode)) {
    // Stay where the pulse harmonic is linear in the amplitude.
    if (cl->coupling > 0.0) dx = std::min(dx, 0.01 * cl->t_n / cl->coupling);
  }
  const double period = 2.0 * kPi / mech.omega_m;
  const double dt = period / static_cast<double>(std::max<std::size_t>(settings.steps_per_cycle, 50));
  const double t_end = settings.decay_lengths / mech.gamma_m;
  SimulationOptions opt;
  opt.downsample = settings.downsample;
  const MirrorTrajectory tr = simulate(mech, abs, drive, eq.x + dx, 0.0, t_end, dt, opt);
  const double skip = std::min(3.0 / mech.kappa_m, 0.25 * t_end);
  return ringdown_extract(tr, skip);
}

ThresholdReport bracket_threshold(const MechParams& mech, const AbsorptionModel& abs,
                                  const IntensityDrive& drive_template, double formula,
                                  double tolerance, const ProbeSettings& settings) {
  if (!(formula > 0.0)) throw DomainError("bracket_threshold: formula intensity must be positive");
  if (!(tolerance > 0.0)) throw DomainError("bracket_threshold: tolerance must be positive");
  ThresholdReport rep;
  rep.formula = formula;
  const auto grows = [&](double l0) {
    IntensityDrive d = drive_template;
    d.l0 = l0;
    ++rep.simulations;
    return probe_growth(mech, abs, d, settings).gamma < 0.0;
  };
  double lo = 0.5 * formula;
  double hi = 2.0 * formula;
  int k = 0;
  while (grows(lo)) {
    if (++k > 6) throw InstabilityError("bracket_threshold: grows at every probed intensity");
    hi = lo;
    lo *= 0.5;
  }
  k = 0;
  while (!grows(hi)) {
    if (++k > 6) throw InstabilityError("bracket_threshold: decays at every probed intensity");
    lo = hi;
    hi *= 2.0;
  }
  while (hi / lo - 1.0 > tolerance) {
    const double mid = std::sqrt(lo * hi);
    if (grows(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  rep.lower = lo;
  rep.upper = hi;
  rep.simulated = std::sqrt(lo * hi);
  rep.relative_gap = rep.simulated / formula - 1.0;
  return rep;
}

}  // namespace mlock::thermo
