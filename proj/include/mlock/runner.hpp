#pragma once

// Configuration-driven experiment runner behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace mlock::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kOutputDirEnv = "MLOCK_OUTPUT_DIR";

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
};

struct Finding {
  std::string where;  // e.g. "experiments[1].parameters.beta"
  std::string message;
};

std::string format_finding(const Finding& f);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Finding> findings);
  const std::vector<Finding>& findings() const { return findings_; }

 private:
  std::vector<Finding> findings_;
};

class ConfigIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical dimension of a parameter. Plain JSON numbers are taken as SI; strings
// of the form "<number> <unit>" are converted (Hz on an angular frequency is
// multiplied by 2 pi).
enum class Dim {
  none,
  length,
  mass,
  time,
  angular_frequency,
  rate,
  frequency,
  voltage,
  force_per_kelvin,
  shift_per_kelvin,
  per_length,
  per_length2,
  coupling,
};

std::string dim_name(Dim d);

// Parses "<number> <unit>" into SI. Returns the dimension of the unit.
struct Quantity {
  double value = 0.0;
  Dim dim = Dim::none;
};
std::optional<Quantity> parse_quantity(const std::string& text);

enum class Kind { real, integer, boolean, text };

enum class Constraint { none, positive, nonnegative, above_one, at_least_one, at_least_three };

struct KeySpec {
  std::string name;
  Kind kind = Kind::real;
  Dim dim = Dim::none;
  bool required = false;
  std::optional<json> fallback;  // default when absent
  Constraint constraint = Constraint::none;
  std::string help;
};

const std::vector<std::string>& experiment_names();
const std::vector<KeySpec>& schema_for(const std::string& experiment);

using Value = std::variant<double, std::int64_t, bool, std::string>;

// Parameters after unit conversion and defaulting.
class Params {
 public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::optional<double> maybe_real(const std::string& key) const;
  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

struct ExperimentConfig {
  std::string experiment;
  std::string name;  // output subdirectory
  std::uint64_t seed = 0;
  std::string output_dir;
  json raw;  // the experiment object as written
  Params params;
};

struct SuiteConfig {
  std::vector<ExperimentConfig> experiments;
  json raw;
};

json load_config_file(const std::filesystem::path& path);

// All schema violations in a config document (single experiment or a suite
// {"experiments": [...]}); empty means valid. Never mutates.
std::vector<Finding> validate_config(const json& doc);

// Validates then resolves; throws ValidationError with every finding.
SuiteConfig parse_config(const json& doc);

struct Table {
  std::string file;  // relative to the experiment directory
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  std::vector<Table> tables;
  json derived = json::object();
  std::vector<std::string> warnings;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

struct OutputRecord {
  std::string file;
  std::string sha256;
  std::size_t rows = 0;
};

// Tab-separated, one-line header, %.17g numbers.
std::string render_table(const Table& table);
std::string sha256_hex(const std::string& bytes);
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;  // --out; beats the environment
};

// Runs every experiment in the suite, writing tables then a manifest per
// experiment directory. Returns the manifests.
std::vector<json> run_suite(SuiteConfig suite, const RunOptions& options);

std::string resolve_output_dir(const std::string& from_config, const RunOptions& options);

json paper_preset();

std::string library_version();

}  // namespace mlock::cli
