#include <cmath>
#include <cstdio>
#include <numbers>

#include "mlock/adler_sync.hpp"
#include "mlock/combmath.hpp"
#include "mlock/phase_lattice.hpp"
#include "mlock/pulse_shaping.hpp"
#include "mlock/runner.hpp"
#include "mlock/thermomech.hpp"

namespace mlock::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> period_grid(std::size_t points) {
  std::vector<double> s(points);
  for (std::size_t i = 0; i < points; ++i) {
    s[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(points);
  }
  return s;
}

ExperimentResult run_comb(const Params& p) {
  const double beta = p.real("beta");
  const auto points = static_cast<std::size_t>(p.integer("points"));
  const int k = p.has("truncation_k") ? static_cast<int>(p.integer("truncation_k"))
                                      : combmath::adaptive_truncation(beta);
  ExperimentResult r;
  Table t{"comb.tsv", {"s", "comb_closed", "comb_series", "abs_diff"}, {}};
  double mean = 0.0;
  double worst = 0.0;
  for (double s : period_grid(points)) {
    const double c = combmath::comb_closed(s, beta);
    const double q = combmath::comb_series(s, beta, k);
    t.rows.push_back({s, c, q, std::abs(c - q)});
    mean += c;
    worst = std::max(worst, std::abs(c - q));
  }
  r.tables.push_back(std::move(t));
  r.derived["beta"] = beta;
  r.derived["truncation_k"] = k;
  r.derived["tail_bound"] = combmath::comb_tail_bound(beta, k);
  r.derived["hwhm"] = combmath::comb_hwhm(beta);
  r.derived["linewidth_quoted"] = combmath::comb_linewidth_quoted(beta);
  r.derived["period_mean"] = mean / static_cast<double>(points);
  r.derived["max_series_error"] = worst;
  return r;
}

ExperimentResult run_lattice(const Params& p, std::uint64_t seed) {
  lattice::LatticeConfig cfg;
  cfg.n_modes = static_cast<int>(p.integer("n_modes"));
  cfg.mu_m = p.real("mu_m");
  cfg.t_n = p.real("t_n");
  cfg.dt = p.real("dt");
  cfg.seed = seed;
  cfg.boundary = p.text("boundary") == "periodic" ? lattice::Boundary::periodic
                                                   : lattice::Boundary::open_chain;
  cfg.validate();
  lattice::LangevinRun run;
  run.steps = static_cast<std::size_t>(p.integer("steps"));
  run.sample_every = static_cast<std::size_t>(p.integer("sample_every"));
  run.burn_in = p.has("burn_in") ? static_cast<std::size_t>(p.integer("burn_in")) : cfg.default_burn_in();
  const int max_k = static_cast<int>(std::min<std::int64_t>(p.integer("max_k"), cfg.n_modes - 1));
  const std::size_t samples = run.steps / run.sample_every;
  lattice::LatticeStatistics stats(max_k, std::max<std::size_t>(1, samples / 50));
  stats.set_config(cfg);

  ExperimentResult r;
  const bool traj = p.boolean("write_trajectory");
  const std::size_t traj_every =
      std::max<std::size_t>(1, static_cast<std::size_t>(p.integer("trajectory_every")) / run.sample_every);
  Table trajectory{"lattice_trajectory.tsv", {"time"}, {}};
  for (int m = 0; m < cfg.n_modes; ++m) trajectory.header.push_back("theta_" + std::to_string(m));
  std::size_t seen = 0;
  lattice::run_langevin(cfg, run, [&](const lattice::LatticeState& st) {
    stats.add(st);
    if (traj && seen % traj_every == 0) {
      std::vector<double> row{st.time};
      row.insert(row.end(), st.theta.begin(), st.theta.end());
      trajectory.rows.push_back(std::move(row));
    }
    ++seen;
  });

  const double beta = cfg.beta_n();
  const bool open = cfg.boundary == lattice::Boundary::open_chain;
  const auto n_gibbs = static_cast<std::size_t>(p.integer("gibbs_samples"));
  const auto law = beta <= 0.5 ? lattice::GibbsLaw::gaussian : lattice::GibbsLaw::von_mises;
  std::vector<lattice::BatchedMean> gibbs_corr(static_cast<std::size_t>(max_k) + 1);
  const auto grid = period_grid(static_cast<std::size_t>(p.integer("waveform_points")));
  std::vector<lattice::BatchedMean> wave(grid.size());
  if (open) {
    sde::RngStream rng = sde::RngStream::substream(seed, 1);
    const auto amps = lattice::ModeAmplitudes::uniform(static_cast<std::size_t>(cfg.n_modes));
    for (std::size_t i = 0; i < n_gibbs; ++i) {
      const auto st = lattice::sample_gibbs(beta, cfg.n_modes, rng, law);
      for (int k = 0; k <= max_k; ++k) {
        double acc = 0.0;
        for (int m = k; m < cfg.n_modes; ++m) acc += std::cos(st.theta[m - k] - st.theta[m]);
        gibbs_corr[k].add(acc / (cfg.n_modes - k));
      }
      const auto v = lattice::intensity_waveform(st, amps, grid);
      for (std::size_t j = 0; j < grid.size(); ++j) wave[j].add(v[j]);
    }
  } else {
    r.warnings.push_back("periodic boundary: Gibbs oracle and waveform comparison skipped");
  }

  Table corr{"lattice_correlations.tsv",
             {"k", "langevin_re", "langevin_se", "gibbs_re", "gibbs_se", "exact_open_chain",
              "gaussian_exp_minus_k_beta"},
             {}};
  for (int k = 0; k <= max_k; ++k) {
    corr.rows.push_back({static_cast<double>(k), stats.correlation_re(k).mean(),
                         stats.correlation_re(k).standard_error(),
                         open ? gibbs_corr[k].mean() : NAN, open ? gibbs_corr[k].standard_error() : NAN,
                         lattice::open_chain_correlation(beta, k), std::exp(-k * beta)});
  }
  r.tables.push_back(std::move(corr));
  if (open) {
    Table w{"lattice_waveform.tsv", {"s", "gibbs_mean", "gibbs_se", "comb_finite", "comb_closed"}, {}};
    for (std::size_t j = 0; j < grid.size(); ++j) {
      w.rows.push_back({grid[j], wave[j].mean(), wave[j].standard_error(),
                        combmath::comb_finite(grid[j], beta, cfg.n_modes),
                        combmath::comb_closed(grid[j], beta)});
    }
    r.tables.push_back(std::move(w));
  }
  if (traj) r.tables.push_back(std::move(trajectory));

  r.derived["beta_n"] = beta;
  r.derived["samples"] = stats.samples();
  r.derived["burn_in"] = run.burn_in;
  r.derived["bond_square"] = stats.bond_square().mean();
  r.derived["bond_square_se"] = stats.bond_square().standard_error();
  r.derived["bond_square_gaussian"] = 2.0 * beta;
  r.derived["bond_square_exact_open_chain"] = lattice::open_chain_bond_square(beta);
  r.derived["energy"] = stats.energy().mean();
  r.derived["gibbs_law"] = law == lattice::GibbsLaw::gaussian ? "gaussian" : "von_mises";
  return r;
}

ExperimentResult run_pulse(const Params& p) {
  const pulse::cplx g_m(p.real("g_m_re"), p.real("g_m_im"));
  const pulse::cplx g0(p.real("g0_re"), p.real("g0_im"));
  const int n = static_cast<int>(p.integer("n"));
  const double t_r = p.real("t_r");
  const auto traj = pulse::roundtrip_iterate(g0, g_m, n);
  // Continuous solution through g0 at tau = 0.
  const pulse::cplx tau0 = -std::atanh(g0 / g_m) / g_m;
  ExperimentResult r;
  Table t{"pulse.tsv", {"round_trip", "time", "g_re", "g_im", "tanh_re", "tanh_im", "rel_dev"}, {}};
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const pulse::cplx c = g_m * std::tanh(g_m * (static_cast<double>(i) - tau0));
    const pulse::cplx g = traj[static_cast<std::size_t>(i)];
    const double rel = std::abs(c) > 0.0 ? std::abs(g - c) / std::abs(c) : std::abs(g - c);
    if (i > 0) worst = std::max(worst, rel);
    t.rows.push_back({static_cast<double>(i), i * t_r, g.real(), g.imag(), c.real(), c.imag(), rel});
  }
  r.tables.push_back(std::move(t));
  const pulse::cplx gm2 = g_m * g_m;
  const pulse::cplx fixed = 0.5 * (-gm2 + std::sqrt(gm2 * gm2 + 4.0 * gm2));
  r.derived["g_m"] = {g_m.real(), g_m.imag()};
  r.derived["map_fixed_point"] = {fixed.real(), fixed.imag()};
  r.derived["final_g"] = {traj.back().real(), traj.back().imag()};
  r.derived["max_rel_dev"] = worst;
  return r;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ExperimentResult run_adler(const Params& p) {
  const double carrier = p.real("carrier");
  const double detuning = p.real("detuning");
  const double v0 = p.real("v_am0");
  const auto count = static_cast<std::size_t>(p.integer("v_am_count"));
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    grid.push_back(p.real("v_am_min") + f * (p.real("v_am_max") - p.real("v_am_min")));
  }
  const auto base = adler::AdlerParams::from_threshold(carrier, carrier - detuning, v0, grid.front());
  adler::SweepOptions opt;
  opt.segment_len = static_cast<std::size_t>(p.integer("segment_len"));
  opt.phi0 = p.real("phi0");
  const double carrier_hz = carrier / (2.0 * kPi);
  opt.band_lo_hz = p.maybe_real("band_lo").value_or(0.0);
  opt.band_hi_hz = p.maybe_real("band_hi").value_or(0.0);
  const double fs = p.real("sample_rate");
  const double duration = p.real("duration");

  ExperimentResult r;
  Table map{"adler_map.tsv", {"freq_hz"}, {}};
  Table lines{"adler_lines.tsv",
              {"v_am", "i_b", "beat_hz", "main_hz", "spacing_hz", "ratio_plus", "ratio_minus",
               "exp_minus_beta_b"},
              {}};
  std::vector<std::vector<double>> columns;
  std::vector<double> freqs;
  for (double v : grid) {
    adler::AdlerParams ap = base;
    ap.v_am = v;
    const auto ds = adler::detector_spectrum(ap, duration, fs, opt);
    for (const auto& w : ds.warnings) r.warnings.push_back(w);
    const auto& spec = ds.spectrum;
    std::size_t lo = 0, hi = spec.psd.size() - 1;
    if (opt.band_hi_hz > opt.band_lo_hz) {
      lo = spec.bin_of(opt.band_lo_hz);
      hi = spec.bin_of(opt.band_hi_hz);
    }
    if (freqs.empty()) freqs.assign(spec.freqs.begin() + lo, spec.freqs.begin() + hi + 1);
    columns.emplace_back(spec.psd.begin() + lo, spec.psd.begin() + hi + 1);
    map.header.push_back("psd_v_" + fmt_g(v));

    std::vector<double> row{v, ds.i_b, ds.beat_hz, NAN, NAN, NAN, NAN, NAN};
    if (ds.beat_hz > 4.0 * spec.resolution) {
      const auto main = adler::strongest_line(spec, carrier_hz - 2.5 * ds.beat_hz,
                                              carrier_hz + 2.5 * ds.beat_hz);
      const auto ladder = adler::sideband_ladder(spec, main.freq_hz, ds.beat_hz, 2);
      row[3] = main.freq_hz;
      row[4] = 0.5 * (ladder.at(1).freq_hz - ladder.at(-1).freq_hz);
      row[5] = ladder.amplitude_ratio(2, 1);
      row[6] = ladder.amplitude_ratio(-2, -1);
      row[7] = std::exp(-std::acosh(std::abs(ds.i_b)));
    } else {
      const auto main = adler::strongest_line(spec, 0.0, fs / 2.0);
      row[3] = main.freq_hz;
    }
    lines.rows.push_back(row);
  }
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    std::vector<double> row{freqs[f]};
    for (const auto& c : columns) row.push_back(c[f]);
    map.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(map));
  r.tables.push_back(std::move(lines));
  r.derived["zeta_am"] = base.zeta_am;
  r.derived["v_am_grid"] = grid;
  std::vector<double> ib;
  for (double v : grid) ib.push_back(v0 / v);
  r.derived["i_b"] = ib;
  r.derived["sample_rate"] = fs;
  r.derived["segment_len"] = opt.segment_len;
  r.derived["resolution_hz"] = fs / static_cast<double>(opt.segment_len);
  return r;
}

struct Device {
  thermo::MechParams mech;
  thermo::AbsorptionModel abs;
};

Device device_from(const Params& p) {
  Device d;
  d.mech.m_m = p.real("m_m");
  d.mech.omega_m = p.real("omega_m");
  d.mech.gamma_m = p.has("gamma_m") ? p.real("gamma_m") : d.mech.omega_m / (2.0 * p.real("q_factor"));
  d.mech.theta_ph = p.real("theta_ph");
  d.mech.theta_fh = p.real("theta_fh");
  d.mech.kappa_m = p.has("kappa_m") ? p.real("kappa_m") : p.real("kappa_ratio") * d.mech.omega_m;
  d.abs.a_h0 = p.real("a_h0");
  d.abs.k_a1 = p.real("k_a1");
  d.abs.k_a2 = p.real("k_a2");
  d.mech.validate();
  d.abs.validate();
  return d;
}

thermo::NoiseChain chain_from(const Params& p) {
  thermo::NoiseChain c;
  c.g_oa = p.real("g_oa");
  c.n_pi = p.real("n_pi");
  c.n_p = p.real("n_p");
  c.gamma_om = p.has("gamma_om") ? p.real("gamma_om") : p.real("gamma_om_ratio") * p.real("omega_r");
  if (p.has("lambda_l")) c.lambda_l = p.real("lambda_l");
  if (p.has("delta_lambda")) c.delta_lambda = p.real("delta_lambda");
  if (p.has("l_r")) c.l_r = p.real("l_r");
  if (p.has("n_eff")) c.n_eff = p.real("n_eff");
  c.omega_p = p.has("omega_p") ? p.real("omega_p") : 2.0 * kPi * pulse::kSpeedOfLight / c.lambda_l;
  return c;
}

ExperimentResult run_mirror(const Params& p, bool mml) {
  const Device dev = device_from(p);
  const auto& mech = dev.mech;
  const auto& abs = dev.abs;
  ExperimentResult r;

  thermo::IntensityDrive drive;
  std::optional<double> formula;
  const auto seo = thermo::seo_threshold(mech, abs);
  double t_n = 0.0;
  if (mml) {
    t_n = p.has("t_n") ? p.real("t_n") : thermo::effective_noise(chain_from(p)).t_n;
    thermo::ClosedLoopDrive cl;
    cl.coupling = p.maybe_real("coupling").value_or(thermo::mml_coupling(mech, abs));
    cl.t_n = t_n;
    cl.beta_floor = p.real("beta_floor");
    cl.phase_offset = p.real("phase_offset");
    drive.mode = cl;
    formula = thermo::mml_threshold(mech, abs, t_n);
    r.derived["t_n"] = t_n;
    r.derived["coupling"] = cl.coupling;
    r.derived["two_omega_over_t_n"] = 2.0 * mech.omega_m / t_n;
  } else {
    formula = thermo::seo_threshold(mech, abs);
  }
  if (p.has("l0")) {
    drive.l0 = p.real("l0");
  } else {
    if (!formula) {
      throw DomainError(std::string(mml ? "mml" : "seo") +
                        ": no instability for this sign of k_a1 * theta_fh; give l0 explicitly");
    }
    drive.l0 = p.maybe_real("l0_over_threshold").value_or(1.5) * *formula;
  }

  r.derived["l0"] = drive.l0;
  r.derived["gamma_m"] = mech.gamma_m;
  r.derived["kappa_m"] = mech.kappa_m;
  r.derived["theta_t"] = thermo::theta_t(mech.kappa_m, mech.omega_m);
  const double gh0 = thermo::gamma_h0(mech, abs, drive.l0);
  const double gh1 = mml ? thermo::gamma_h1(mech, abs, drive.l0, t_n) : 0.0;
  r.derived["gamma_h0"] = gh0;
  if (mml) r.derived["gamma_h1"] = gh1;
  const auto eff = thermo::effective_params(mech, gh0, gh1);
  r.derived["omega_eff"] = eff.omega_eff;
  r.derived["gamma_eff"] = eff.gamma_eff;
  r.derived["seo_threshold"] = seo ? json(*seo) : json(nullptr);
  if (mml) {
    r.derived["mml_threshold"] = formula ? json(*formula) : json(nullptr);
    if (formula && seo) r.derived["mml_over_seo"] = *formula / *seo;
    r.derived["t_n_over_two_omega"] = t_n / (2.0 * mech.omega_m);
  }
  const auto mode = thermo::oracle_mode(mech, abs, drive);
  r.derived["oracle_omega"] = mode.omega;
  r.derived["oracle_gamma"] = mode.gamma;

  const auto eq = thermo::static_equilibrium(mech, abs, drive.l0);
  const double period = 2.0 * kPi / mech.omega_m;
  const double dt = period / static_cast<double>(p.integer("steps_per_cycle"));
  const double dx = abs.k_a1 != 0.0 ? p.real("x0_rel") / std::abs(abs.k_a1) : 1e-9;
  thermo::SimulationOptions so;
  so.downsample = static_cast<std::size_t>(p.integer("downsample"));
  const auto traj = thermo::simulate(mech, abs, drive, eq.x + dx, 0.0, p.real("cycles") * period, dt, so);
  Table t{"trajectory.tsv", {"t", "x", "v", "t_r", "l_h"}, {}};
  t.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    t.rows.push_back({traj.time[i], traj.x[i], traj.v[i], traj.t_r_rel[i], traj.intensity[i]});
  }
  r.tables.push_back(std::move(t));
  r.derived["x_rest"] = traj.x_rest;
  r.derived["halted"] = traj.halted;
  if (traj.halted) r.warnings.push_back(traj.halt_reason);

  if (p.boolean("search_threshold")) {
    if (!formula) {
      r.warnings.push_back("threshold search skipped: formula predicts no instability");
    } else {
      thermo::ProbeSettings ps;
      ps.decay_lengths = p.real("probe_decay_lengths");
      ps.steps_per_cycle = static_cast<std::size_t>(p.integer("steps_per_cycle"));
      const auto rep = thermo::bracket_threshold(mech, abs, drive, *formula, p.real("tolerance"), ps);
      r.tables.push_back({"threshold.tsv",
                          {"formula", "simulated", "lower", "upper", "relative_gap", "simulations"},
                          {{rep.formula, rep.simulated, rep.lower, rep.upper, rep.relative_gap,
                            static_cast<double>(rep.simulations)}}});
      r.derived["threshold_simulated"] = rep.simulated;
      r.derived["threshold_relative_gap"] = rep.relative_gap;
    }
  }
  return r;
}

ExperimentResult run_noise(const Params& p) {
  const thermo::NoiseChain c = chain_from(p);
  const auto d = thermo::effective_noise(c);
  const double omega_m = p.real("omega_m");
  const double omega_r_len = 2.0 * kPi * pulse::kSpeedOfLight / (c.n_eff * c.l_r);
  const double gf = pulse::gamma_f_from_band(c.delta_lambda, c.lambda_l, c.n_eff);
  ExperimentResult r;
  r.tables.push_back({"noise.tsv",
                      {"alpha_nf", "t_n", "two_omega_over_t_n", "n_r", "p_oa", "omega_r_from_length",
                       "sqrt_gamma_f", "threshold_ratio"},
                      {{d.alpha_nf, d.t_n, 2.0 * omega_m / d.t_n, d.n_r, d.p_oa, omega_r_len, gf,
                        d.t_n / (2.0 * omega_m)}}});
  r.derived["alpha_nf"] = d.alpha_nf;
  r.derived["t_n"] = d.t_n;
  r.derived["two_omega_over_t_n"] = 2.0 * omega_m / d.t_n;
  r.derived["n_r"] = d.n_r;
  r.derived["p_oa"] = d.p_oa;
  r.derived["omega_r_from_length"] = omega_r_len;
  r.derived["threshold_ratio"] = d.t_n / (2.0 * omega_m);
  return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto& e = config.experiment;
  if (e == "comb") return run_comb(config.params);
  if (e == "lattice") return run_lattice(config.params, config.seed);
  if (e == "pulse") return run_pulse(config.params);
  if (e == "adler") return run_adler(config.params);
  if (e == "seo") return run_mirror(config.params, false);
  if (e == "mml") return run_mirror(config.params, true);
  if (e == "noise") return run_noise(config.params);
  throw ValidationError({{"experiment", "unknown experiment '" + e + "'"}});
}

}  // namespace mlock::cli
