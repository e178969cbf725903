#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "mlock/runner.hpp"

namespace mlock::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct UnitEntry {
  const char* symbol;
  Dim dim;
  double factor;
};

const UnitEntry kUnits[] = {
    {"m", Dim::length, 1.0},
    {"km", Dim::length, 1e3},
    {"mm", Dim::length, 1e-3},
    {"um", Dim::length, 1e-6},
    {"nm", Dim::length, 1e-9},
    {"pm", Dim::length, 1e-12},
    {"kg", Dim::mass, 1.0},
    {"g", Dim::mass, 1e-3},
    {"mg", Dim::mass, 1e-6},
    {"ug", Dim::mass, 1e-9},
    {"ng", Dim::mass, 1e-12},
    {"pg", Dim::mass, 1e-15},
    {"s", Dim::time, 1.0},
    {"ms", Dim::time, 1e-3},
    {"us", Dim::time, 1e-6},
    {"ns", Dim::time, 1e-9},
    {"rad/s", Dim::angular_frequency, 1.0},
    {"krad/s", Dim::angular_frequency, 1e3},
    {"Mrad/s", Dim::angular_frequency, 1e6},
    {"Hz", Dim::frequency, 1.0},
    {"kHz", Dim::frequency, 1e3},
    {"MHz", Dim::frequency, 1e6},
    {"GHz", Dim::frequency, 1e9},
    {"1/s", Dim::rate, 1.0},
    {"s^-1", Dim::rate, 1.0},
    {"1/ms", Dim::rate, 1e3},
    {"1/us", Dim::rate, 1e6},
    {"V", Dim::voltage, 1.0},
    {"mV", Dim::voltage, 1e-3},
    {"N/K", Dim::force_per_kelvin, 1.0},
    {"nN/K", Dim::force_per_kelvin, 1e-9},
    {"rad/(s K)", Dim::shift_per_kelvin, 1.0},
    {"rad/(s*K)", Dim::shift_per_kelvin, 1.0},
    {"1/m", Dim::per_length, 1.0},
    {"1/mm", Dim::per_length, 1e3},
    {"1/um", Dim::per_length, 1e6},
    {"1/m^2", Dim::per_length2, 1.0},
    {"1/um^2", Dim::per_length2, 1e12},
    {"rad/(s m)", Dim::coupling, 1.0},
    {"rad/(s*m)", Dim::coupling, 1.0},
};

KeySpec real(const std::string& name, Dim dim, bool required, std::optional<double> fallback,
             Constraint c, const std::string& help) {
  KeySpec k;
  k.name = name;
  k.kind = Kind::real;
  k.dim = dim;
  k.required = required;
  if (fallback) k.fallback = json(*fallback);
  k.constraint = c;
  k.help = help;
  return k;
}

KeySpec integer(const std::string& name, bool required, std::optional<std::int64_t> fallback,
                Constraint c, const std::string& help) {
  KeySpec k;
  k.name = name;
  k.kind = Kind::integer;
  k.required = required;
  if (fallback) k.fallback = json(*fallback);
  k.constraint = c;
  k.help = help;
  return k;
}

KeySpec boolean(const std::string& name, bool fallback, const std::string& help) {
  KeySpec k;
  k.name = name;
  k.kind = Kind::boolean;
  k.fallback = json(fallback);
  k.help = help;
  return k;
}

KeySpec text(const std::string& name, const std::string& fallback, const std::string& help) {
  KeySpec k;
  k.name = name;
  k.kind = Kind::text;
  k.fallback = json(fallback);
  k.help = help;
  return k;
}

using C = Constraint;

std::vector<KeySpec> mech_keys() {
  return {
      real("m_m", Dim::mass, true, {}, C::positive, "effective mirror mass"),
      real("omega_m", Dim::angular_frequency, true, {}, C::positive, "mechanical angular frequency"),
      real("gamma_m", Dim::rate, false, {}, C::nonnegative, "mechanical damping rate"),
      real("q_factor", Dim::none, false, {}, C::positive, "alternative to gamma_m: omega_m / (2 gamma_m)"),
      real("theta_ph", Dim::shift_per_kelvin, true, {}, C::none, "frequency shift per kelvin"),
      real("theta_fh", Dim::force_per_kelvin, true, {}, C::none, "thermal force per kelvin"),
      real("kappa_m", Dim::rate, false, {}, C::positive, "thermal relaxation rate"),
      real("kappa_ratio", Dim::none, false, {}, C::positive, "alternative to kappa_m: kappa_m / omega_m"),
      real("a_h0", Dim::none, true, {}, C::positive, "absorption at rest"),
      real("k_a1", Dim::per_length, true, {}, C::none, "linear absorption slope (> 0 red)"),
      real("k_a2", Dim::per_length2, false, 0.0, C::none, "quadratic absorption term"),
      real("l0", Dim::none, false, {}, C::nonnegative, "mean intensity"),
      real("l0_over_threshold", Dim::none, false, {}, C::positive,
           "alternative to l0: multiple of the formula threshold"),
      real("x0_rel", Dim::none, false, 1e-3, C::positive, "initial |k_A1| (x0 - x_rest)"),
      real("cycles", Dim::none, false, 2000.0, C::positive, "trajectory length in mechanical periods"),
      integer("steps_per_cycle", false, 64, C::positive, "RK4 steps per mechanical period (>= 50)"),
      integer("downsample", false, 16, C::positive, "keep every n-th trajectory sample"),
      boolean("search_threshold", true, "bracket the threshold by simulation"),
      real("tolerance", Dim::none, false, 0.01, C::positive, "relative width of the threshold bracket"),
      real("probe_decay_lengths", Dim::none, false, 1.0, C::positive,
           "probe run length in units of 1/gamma_m"),
  };
}

std::vector<KeySpec> noise_keys(bool required) {
  return {
      real("g_oa", Dim::none, required, {}, C::above_one, "amplifier gain"),
      real("n_pi", Dim::none, required, {}, C::at_least_one, "population inversion factor"),
      real("gamma_om", Dim::rate, false, {}, C::nonnegative, "optical mode damping rate"),
      real("gamma_om_ratio", Dim::none, false, {}, C::nonnegative, "alternative: gamma_om / omega_r"),
      real("omega_r", Dim::angular_frequency, false, {}, C::positive, "cavity round-trip angular frequency"),
      real("n_p", Dim::none, required, {}, C::positive, "mean photons per mode"),
  };
}

std::map<std::string, std::vector<KeySpec>> build_schemas() {
  std::map<std::string, std::vector<KeySpec>> s;
  s["comb"] = {
      real("beta", Dim::none, true, {}, C::positive, "pulse width parameter"),
      integer("points", false, 1001, C::positive, "samples over one period"),
      integer("truncation_k", false, {}, C::positive, "series truncation (default adaptive)"),
  };
  s["lattice"] = {
      integer("n_modes", false, 64, C::at_least_three, "number of modes"),
      real("mu_m", Dim::rate, true, {}, C::positive, "modulation amplitude"),
      real("t_n", Dim::rate, true, {}, C::positive, "noise strength"),
      real("dt", Dim::time, false, 1e-3, C::positive, "time step (dt mu_m <= 0.1)"),
      integer("steps", false, 1000000, C::positive, "Langevin steps after burn-in"),
      integer("burn_in", false, {}, C::nonnegative, "burn-in steps (default 10/(mu_m dt))"),
      integer("sample_every", false, 100, C::positive, "steps between samples"),
      integer("max_k", false, 10, C::positive, "largest correlation lag"),
      text("boundary", "open_chain", "open_chain or periodic"),
      integer("gibbs_samples", false, 1000, C::positive, "independent Gibbs samples"),
      integer("waveform_points", false, 129, C::positive, "s grid over one period"),
      boolean("write_trajectory", false, "write sampled phases (large)"),
      integer("trajectory_every", false, 1000, C::positive, "steps between trajectory rows"),
  };
  s["pulse"] = {
      real("g_m_re", Dim::none, true, {}, C::none, "Re g_m"),
      real("g_m_im", Dim::none, false, 0.0, C::none, "Im g_m"),
      real("g0_re", Dim::none, false, 0.0, C::none, "Re g at round trip 0"),
      real("g0_im", Dim::none, false, 0.0, C::none, "Im g at round trip 0"),
      integer("n", true, {}, C::positive, "round trips"),
      real("t_r", Dim::time, false, 1.0, C::positive, "round-trip period"),
  };
  s["adler"] = {
      real("detuning", Dim::angular_frequency, true, {}, C::none, "omega_AM - omega_R"),
      real("v_am0", Dim::voltage, true, {}, C::positive, "locking threshold amplitude"),
      real("v_am_min", Dim::voltage, true, {}, C::positive, "smallest grid amplitude"),
      real("v_am_max", Dim::voltage, true, {}, C::positive, "largest grid amplitude"),
      integer("v_am_count", false, 8, C::positive, "grid points"),
      real("carrier", Dim::angular_frequency, false, kTwoPi * 8192.0, C::positive,
           "detector carrier angular frequency"),
      real("sample_rate", Dim::frequency, false, 262144.0, C::positive, "samples per second"),
      real("duration", Dim::time, false, 8.0, C::positive, "signal length per grid point"),
      integer("segment_len", false, 65536, C::positive, "Welch segment (power of two)"),
      real("band_lo", Dim::frequency, false, {}, C::nonnegative, "lowest kept frequency"),
      real("band_hi", Dim::frequency, false, {}, C::positive, "highest kept frequency"),
      real("phi0", Dim::none, false, 0.0, C::none, "initial phase"),
  };
  s["seo"] = mech_keys();
  auto mml = mech_keys();
  for (auto& k : noise_keys(false)) mml.push_back(k);
  mml.push_back(real("t_n", Dim::rate, false, {}, C::positive, "noise strength (else from the noise chain)"));
  mml.push_back(real("coupling", Dim::coupling, false, {}, C::nonnegative,
                     "mirror-to-modulation coupling (default 2 omega_m |k_A1|)"));
  mml.push_back(real("beta_floor", Dim::none, false, 1e-3, C::positive, "smallest pulse beta"));
  mml.push_back(real("phase_offset", Dim::none, false, 0.0, C::none, "pulse phase offset, rad"));
  s["mml"] = mml;
  auto noise = noise_keys(true);
  noise.push_back(real("lambda_l", Dim::length, true, {}, C::positive, "laser wavelength"));
  noise.push_back(real("delta_lambda", Dim::length, true, {}, C::positive, "gain bandwidth"));
  noise.push_back(real("l_r", Dim::length, true, {}, C::positive, "ring length"));
  noise.push_back(real("n_eff", Dim::none, true, {}, C::positive, "effective index"));
  noise.push_back(real("omega_m", Dim::angular_frequency, true, {}, C::positive, "mechanical angular frequency"));
  noise.push_back(real("omega_p", Dim::angular_frequency, false, {}, C::positive,
                       "optical angular frequency (default 2 pi c / lambda_l)"));
  s["noise"] = noise;
  return s;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const auto s = build_schemas();
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

const std::set<std::string> kExperimentKeys = {"experiment", "name", "seed", "output_dir",
                                               "parameters", "notes"};
const std::set<std::string> kSuiteKeys = {"experiments", "seed", "output_dir", "notes"};

// Unwraps {"value": ..., "source": ...}.
const json* value_of(const json& v, const std::string& where, std::vector<Finding>& out) {
  if (!v.is_object()) return &v;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (it.key() != "value" && it.key() != "source") {
      out.push_back({where, "unknown field '" + it.key() + "' (expected value/source)"});
    }
  }
  if (!v.contains("value")) {
    out.push_back({where, "annotated value lacks 'value'"});
    return nullptr;
  }
  return &v.at("value");
}

bool check_constraint(double x, Constraint c, const std::string& key, const std::string& where,
                      std::vector<Finding>& out) {
  std::string msg;
  switch (c) {
    case C::none:
      break;
    case C::positive:
      if (!(x > 0.0)) msg = key + " must be positive";
      break;
    case C::nonnegative:
      if (!(x >= 0.0)) msg = key + " must be >= 0";
      break;
    case C::above_one:
      if (!(x > 1.0)) msg = key + " must be > 1";
      break;
    case C::at_least_one:
      if (!(x >= 1.0)) msg = key + " must be >= 1";
      break;
    case C::at_least_three:
      if (!(x >= 3.0)) msg = key + " must be >= 3";
      break;
  }
  if (!std::isfinite(x)) msg = key + " must be finite";
  if (!msg.empty()) out.push_back({where, msg});
  return msg.empty();
}

std::optional<Value> convert(const KeySpec& spec, const json& raw, const std::string& where,
                             std::vector<Finding>& out) {
  const json* v = value_of(raw, where, out);
  if (!v) return std::nullopt;
  switch (spec.kind) {
    case Kind::boolean:
      if (!v->is_boolean()) {
        out.push_back({where, spec.name + " must be true or false"});
        return std::nullopt;
      }
      return Value(v->get<bool>());
    case Kind::text:
      if (!v->is_string()) {
        out.push_back({where, spec.name + " must be a string"});
        return std::nullopt;
      }
      return Value(v->get<std::string>());
    case Kind::integer: {
      if (!v->is_number_integer()) {
        out.push_back({where, spec.name + " must be an integer"});
        return std::nullopt;
      }
      const auto n = v->get<std::int64_t>();
      if (!check_constraint(static_cast<double>(n), spec.constraint, spec.name, where, out)) {
        return std::nullopt;
      }
      return Value(n);
    }
    case Kind::real: {
      double x = 0.0;
      if (v->is_number()) {
        x = v->get<double>();
      } else if (v->is_string()) {
        const auto q = parse_quantity(v->get<std::string>());
        if (!q) {
          out.push_back({where, "cannot parse quantity '" + v->get<std::string>() + "'"});
          return std::nullopt;
        }
        Dim got = q->dim;
        x = q->value;
        if (spec.dim == Dim::angular_frequency && got == Dim::frequency) {
          got = Dim::angular_frequency;
          x *= kTwoPi;
        }
        if (got != spec.dim) {
          out.push_back({where, "unit mismatch: " + spec.name + " expects " + dim_name(spec.dim) +
                                    ", got " + dim_name(q->dim)});
          return std::nullopt;
        }
      } else {
        out.push_back({where, spec.name + " must be a number or a quantity string"});
        return std::nullopt;
      }
      if (!check_constraint(x, spec.constraint, spec.name, where, out)) return std::nullopt;
      return Value(x);
    }
  }
  return std::nullopt;
}

bool have(const Params& p, const std::string& k) { return p.has(k); }

void cross_checks(const std::string& exp, Params& p, const std::string& where,
                  std::vector<Finding>& out) {
  const auto one_of = [&](const std::string& a, const std::string& b, bool need) {
    if (have(p, a) && have(p, b)) out.push_back({where, "give only one of " + a + " and " + b});
    if (need && !have(p, a) && !have(p, b)) {
      out.push_back({where + "." + a, "required key absent (or give " + b + ")"});
    }
  };
  if (exp == "comb") {
    if (have(p, "beta") && p.real("beta") < 1e-6) out.push_back({where + ".beta", "beta must be >= 1e-6"});
  } else if (exp == "lattice") {
    if (have(p, "boundary") && p.text("boundary") != "open_chain" && p.text("boundary") != "periodic") {
      out.push_back({where + ".boundary", "boundary must be open_chain or periodic"});
    }
    if (have(p, "mu_m") && have(p, "dt") && p.real("dt") * p.real("mu_m") > 0.1) {
      out.push_back({where + ".dt", "dt * mu_m must be <= 0.1"});
    }
  } else if (exp == "pulse") {
    if (have(p, "g_m_re") && std::hypot(p.real("g_m_re"), p.real("g_m_im")) >= 1.0) {
      out.push_back({where + ".g_m_re", "|g_m| must be < 1"});
    }
  } else if (exp == "adler") {
    if (have(p, "v_am_min") && have(p, "v_am_max") && !(p.real("v_am_max") >= p.real("v_am_min"))) {
      out.push_back({where + ".v_am_max", "v_am_max must be >= v_am_min"});
    }
    if (have(p, "detuning") && p.real("detuning") == 0.0) {
      out.push_back({where + ".detuning", "detuning must be nonzero"});
    }
    const auto seg = p.integer("segment_len");
    if (seg <= 0 || (seg & (seg - 1)) != 0) {
      out.push_back({where + ".segment_len", "segment_len must be a power of two"});
    }
  } else if (exp == "seo" || exp == "mml") {
    one_of("gamma_m", "q_factor", true);
    one_of("kappa_m", "kappa_ratio", true);
    one_of("l0", "l0_over_threshold", false);
    if (p.integer("steps_per_cycle") < 50) {
      out.push_back({where + ".steps_per_cycle", "steps_per_cycle must be >= 50"});
    }
    if (exp == "mml" && !have(p, "t_n")) {
      for (const char* k : {"g_oa", "n_pi", "n_p"}) {
        if (!have(p, k)) out.push_back({where + "." + k, "required key absent (or give t_n)"});
      }
      if (!have(p, "gamma_om") && !(have(p, "gamma_om_ratio") && have(p, "omega_r"))) {
        out.push_back({where + ".gamma_om", "required key absent (or gamma_om_ratio with omega_r)"});
      }
    }
  } else if (exp == "noise") {
    one_of("gamma_om", "gamma_om_ratio", true);
    if (have(p, "gamma_om_ratio") && !have(p, "omega_r")) {
      out.push_back({where + ".omega_r", "required key absent (needed by gamma_om_ratio)"});
    }
  }
}

ExperimentConfig parse_experiment(const json& e, const std::string& where, const json& defaults,
                                  std::vector<Finding>& out) {
  ExperimentConfig cfg;
  cfg.raw = e;
  if (!e.is_object()) {
    out.push_back({where, "experiment must be an object"});
    return cfg;
  }
  for (auto it = e.begin(); it != e.end(); ++it) {
    if (!kExperimentKeys.count(it.key())) out.push_back({where + "." + it.key(), "unknown key"});
  }
  if (!e.contains("experiment") || !e["experiment"].is_string()) {
    out.push_back({where + ".experiment", "required key absent"});
    return cfg;
  }
  cfg.experiment = e["experiment"].get<std::string>();
  if (!schemas().count(cfg.experiment)) {
    out.push_back({where + ".experiment", "unknown experiment '" + cfg.experiment + "'"});
    return cfg;
  }
  cfg.name = e.value("name", cfg.experiment);
  const json seed = e.contains("seed") ? e["seed"] : defaults.value("seed", json(0));
  if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
    out.push_back({where + ".seed", "seed must be a non-negative integer"});
  } else {
    cfg.seed = seed.get<std::uint64_t>();
  }
  const json od = e.contains("output_dir") ? e["output_dir"] : defaults.value("output_dir", json("out"));
  if (!od.is_string()) {
    out.push_back({where + ".output_dir", "output_dir must be a string"});
  } else {
    cfg.output_dir = od.get<std::string>();
  }

  const json params = e.value("parameters", json::object());
  if (!params.is_object()) {
    out.push_back({where + ".parameters", "parameters must be an object"});
    return cfg;
  }
  const auto& schema = schemas().at(cfg.experiment);
  std::set<std::string> known;
  for (const auto& k : schema) known.insert(k.name);
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!known.count(it.key())) out.push_back({where + ".parameters." + it.key(), "unknown key"});
  }
  for (const auto& spec : schema) {
    const std::string kw = where + ".parameters." + spec.name;
    if (params.contains(spec.name)) {
      if (auto v = convert(spec, params[spec.name], kw, out)) cfg.params.set(spec.name, *v);
    } else if (spec.required) {
      out.push_back({kw, "required key absent"});
    } else if (spec.fallback) {
      if (auto v = convert(spec, *spec.fallback, kw, out)) cfg.params.set(spec.name, *v);
    }
  }
  cross_checks(cfg.experiment, cfg.params, where + ".parameters", out);
  return cfg;
}

std::vector<ExperimentConfig> parse_all(const json& doc, std::vector<Finding>& out) {
  std::vector<ExperimentConfig> exps;
  if (!doc.is_object()) {
    out.push_back({"$", "config must be a JSON object"});
    return exps;
  }
  if (doc.contains("experiments")) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (!kSuiteKeys.count(it.key())) out.push_back({"$." + it.key(), "unknown key"});
    }
    const json& list = doc["experiments"];
    if (!list.is_array() || list.empty()) {
      out.push_back({"$.experiments", "experiments must be a non-empty array"});
      return exps;
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "$.experiments[" + std::to_string(i) + "]";
      exps.push_back(parse_experiment(list[i], where, doc, out));
      if (!exps.back().name.empty() && !names.insert(exps.back().name).second) {
        out.push_back({where + ".name", "duplicate experiment name '" + exps.back().name + "'"});
      }
    }
  } else {
    exps.push_back(parse_experiment(doc, "$", json::object(), out));
  }
  return exps;
}

}  // namespace

std::string format_finding(const Finding& f) { return f.where + ": " + f.message; }

ValidationError::ValidationError(std::vector<Finding> findings)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << findings.size() << " validation finding(s)";
        for (const auto& f : findings) os << "\n  " << format_finding(f);
        return os.str();
      }()),
      findings_(std::move(findings)) {}

std::string dim_name(Dim d) {
  switch (d) {
    case Dim::none: return "dimensionless";
    case Dim::length: return "length";
    case Dim::mass: return "mass";
    case Dim::time: return "time";
    case Dim::angular_frequency: return "angular frequency";
    case Dim::rate: return "rate";
    case Dim::frequency: return "frequency";
    case Dim::voltage: return "voltage";
    case Dim::force_per_kelvin: return "force per kelvin";
    case Dim::shift_per_kelvin: return "frequency shift per kelvin";
    case Dim::per_length: return "inverse length";
    case Dim::per_length2: return "inverse area";
    case Dim::coupling: return "rate per length";
  }
  return "?";
}

std::optional<Quantity> parse_quantity(const std::string& text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const std::string unit = trim(s.substr(used));
  if (unit.empty()) return Quantity{x, Dim::none};
  for (const auto& u : kUnits) {
    if (unit == u.symbol) return Quantity{x * u.factor, u.dim};
  }
  return std::nullopt;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : schemas()) n.push_back(k);
    return n;
  }();
  return names;
}

const std::vector<KeySpec>& schema_for(const std::string& experiment) {
  const auto it = schemas().find(experiment);
  if (it == schemas().end()) throw std::out_of_range("no schema for experiment '" + experiment + "'");
  return it->second;
}

double Params::real(const std::string& key) const {
  const auto& v = values_.at(key);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::logic_error("parameter '" + key + "' is not numeric");
}

std::int64_t Params::integer(const std::string& key) const { return std::get<std::int64_t>(values_.at(key)); }
bool Params::boolean(const std::string& key) const { return std::get<bool>(values_.at(key)); }
const std::string& Params::text(const std::string& key) const {
  return std::get<std::string>(values_.at(key));
}
std::optional<double> Params::maybe_real(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return real(key);
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigIoError("cannot read config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError({{path.string(), std::string("malformed JSON: ") + e.what()}});
  }
}

std::vector<Finding> validate_config(const json& doc) {
  std::vector<Finding> out;
  parse_all(doc, out);
  return out;
}

SuiteConfig parse_config(const json& doc) {
  std::vector<Finding> out;
  SuiteConfig suite;
  suite.experiments = parse_all(doc, out);
  suite.raw = doc;
  if (!out.empty()) throw ValidationError(std::move(out));
  return suite;
}

}  // namespace mlock::cli
