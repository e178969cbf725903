#include "mlock/runner.hpp"

namespace mlock::cli {

namespace {

json tagged(json value, const char* source) { return {{"value", std::move(value)}, {"source", source}}; }

json device(double k_a1, const char* omega_m, const char* omega_source) {
  return {
      {"m_m", tagged("2.7 pg", "placeholder scale: device constant not given, user input")},
      {"omega_m", tagged(omega_m, omega_source)},
      {"q_factor", tagged(1e4, "placeholder scale: device constant not given, user input")},
      {"theta_ph", tagged("-100 rad/(s K)", "placeholder scale; negative for the aluminum layer")},
      {"theta_fh", tagged("-1 nN/K", "placeholder scale; negative for the aluminum layer")},
      {"kappa_ratio", tagged(0.01, "thermal rate stated as a hundredth of the mechanical frequency")},
      {"a_h0", tagged(1e6, "placeholder scale: device constant not given, user input")},
      {"k_a1", tagged(k_a1, k_a1 > 0 ? "placeholder scale; positive = red detuned short cavity"
                                       : "placeholder scale; negative = blue detuned short cavity")},
      {"k_a2", tagged(0.0, "placeholder scale: device constant not given, user input")},
  };
}

json noise_chain() {
  return {
      {"g_oa", tagged(1600.0, "amplifier small-signal gain, noise discussion")},
      {"n_pi", tagged(1.25, "population inversion parameter, noise discussion")},
      {"gamma_om_ratio", tagged(0.1, "typical mode damping rate as a fraction of the ring frequency")},
      {"omega_r", tagged("368.2 kHz", "ring frequency tuned onto the mechanical frequency for MML")},
      {"n_p", tagged(2e6, "mean photon number per mode for the MML measurements")},
  };
}

}  // namespace

json paper_preset() {
  json exps = json::array();
  exps.push_back({{"experiment", "comb"},
                  {"name", "comb"},
                  {"parameters", {{"beta", tagged(0.1, "example width used with the lattice")}, {"points", 1001}}}});
  exps.push_back({{"experiment", "lattice"},
                  {"name", "lattice"},
                  {"parameters",
                   {{"n_modes", 64},
                    {"mu_m", 1.0},
                    {"t_n", 0.2},
                    {"dt", "1 ms"},
                    {"steps", 1000000},
                    {"sample_every", 100},
                    {"max_k", 10},
                    {"gibbs_samples", 1000}}}});
  exps.push_back({{"experiment", "pulse"},
                  {"name", "pulse"},
                  {"parameters", {{"g_m_re", 1e-3}, {"n", 5000}, {"t_r", tagged("2.6932 us", "ring period at 371.3 kHz")}}}});
  exps.push_back({{"experiment", "adler"},
                  {"name", "adler"},
                  {"parameters",
                   {{"detuning", tagged("100 Hz", "modulation set 100 Hz above the ring frequency of 371.3 kHz")},
                    {"v_am0", tagged("0.156 V", "measured synchronization threshold amplitude")},
                    {"v_am_min", "0.039 V"},
                    {"v_am_max", "0.312 V"},
                    {"v_am_count", 8},
                    {"carrier", "8192 Hz"},
                    {"sample_rate", "262144 Hz"},
                    {"duration", "8 s"},
                    {"segment_len", 65536},
                    {"band_lo", "7168 Hz"},
                    {"band_hi", "9216 Hz"}}}});
  json noise = noise_chain();
  noise["lambda_l"] = tagged("1550 nm", "laser wavelength");
  noise["delta_lambda"] = tagged("0.2 nm", "amplifier band");
  noise["l_r"] = tagged("553.88 m", "ring length set so the ring frequency matches the mirror");
  noise["n_eff"] = tagged(1.47, "fiber effective index");
  noise["omega_m"] = tagged("368.2 kHz", "mechanical frequency of the MML mirror");
  exps.push_back({{"experiment", "noise"}, {"name", "noise"}, {"parameters", noise}});

  json seo = device(4e6, "415 kHz", "mechanical frequency of the SEO mirror (ring at 2.48 MHz, not tuned)");
  seo["l0_over_threshold"] = 1.2;
  seo["cycles"] = 4000;
  exps.push_back({{"experiment", "seo"}, {"name", "seo"}, {"parameters", seo}});

  json mml = device(-4e6, "368.2 kHz", "mechanical frequency of the MML mirror");
  const json chain = noise_chain();
  for (auto it = chain.begin(); it != chain.end(); ++it) mml[it.key()] = it.value();
  mml["l0_over_threshold"] = 1.2;
  mml["cycles"] = 4000;
  exps.push_back({{"experiment", "mml"}, {"name", "mml"}, {"parameters", mml}});

  return {{"seed", 20240501},
          {"output_dir", "out"},
          {"notes", "Measured values carry a 'source' description; device constants are placeholders."},
          {"experiments", exps}};
}

}  // namespace mlock::cli
