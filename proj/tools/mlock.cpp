#include <iostream>

#include "CLI11.hpp"
#include "mlock/errors.hpp"
#include "mlock/runner.hpp"

using namespace mlock::cli;

namespace {

int report_findings(const std::vector<Finding>& findings) {
  for (const auto& f : findings) std::cerr << format_finding(f) << "\n";
  return findings.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-locking simulation runner"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run every experiment in a config file");
  run->add_option("config", run_config, "JSON config file")->required();
  run->add_option("--seed", seed, "Override the seed of every experiment");
  run->add_option("--out", out_dir, std::string("Output directory (beats $") + kOutputDirEnv + ")");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("config", validate_path, "JSON config file")->required();

  std::string which;
  auto* preset = app.add_subcommand("preset", "Print a built-in config");
  preset->add_option("name", which, "Preset name")->required()->check(CLI::IsMember({"paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*preset) {
      std::cout << paper_preset().dump(2) << "\n";
      return kExitOk;
    }
    if (*validate) {
      const auto findings = validate_config(load_config_file(validate_path));
      if (findings.empty()) std::cout << "ok\n";
      return report_findings(findings);
    }
    RunOptions opts;
    opts.seed = seed;
    opts.out_dir = out_dir;
    SuiteConfig suite = parse_config(load_config_file(run_config));
    const auto manifests = run_suite(std::move(suite), opts);
    for (const auto& m : manifests) {
      std::cout << m["name"].get<std::string>() << ": " << m["outputs"].size() << " output(s)\n";
      for (const auto& w : m["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigIoError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const mlock::DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitValidation;
  } catch (const mlock::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitValidation;
  } catch (const mlock::InstabilityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const mlock::IntegrationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const mlock::SingularityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const mlock::InsufficientDataError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
