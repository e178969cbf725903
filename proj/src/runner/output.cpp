#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "mlock/runner.hpp"

#ifndef MLOCK_VERSION
#define MLOCK_VERSION "0.0.0"
#endif

namespace mlock::cli {

namespace {

void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string library_version() { return MLOCK_VERSION; }

std::string render_table(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += '\t';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      append_number(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string resolve_output_dir(const std::string& from_config, const RunOptions& options) {
  if (options.out_dir) return *options.out_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return from_config.empty() ? "out" : from_config;
}

std::vector<json> run_suite(SuiteConfig suite, const RunOptions& options) {
  std::vector<json> manifests;
  for (auto& cfg : suite.experiments) {
    if (options.seed) cfg.seed = *options.seed;
    const std::filesystem::path dir =
        std::filesystem::path(resolve_output_dir(cfg.output_dir, options)) / cfg.name;
    std::filesystem::create_directories(dir);

    ExperimentResult result = run_experiment(cfg);

    json echo = cfg.raw;
    echo["seed"] = cfg.seed;
    json manifest;
    manifest["tool"] = "mlock";
    manifest["version"] = library_version();
    manifest["timestamp"] = utc_timestamp();
    manifest["experiment"] = cfg.experiment;
    manifest["name"] = cfg.name;
    manifest["seed"] = cfg.seed;
    manifest["config"] = echo;
    manifest["outputs"] = json::array();
    for (const auto& table : result.tables) {
      const std::string bytes = render_table(table);
      write_atomic(dir / table.file, bytes);
      manifest["outputs"].push_back(
          {{"file", table.file}, {"sha256", sha256_hex(bytes)}, {"rows", table.rows.size()}});
    }
    manifest["derived"] = result.derived;
    manifest["warnings"] = result.warnings;
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    manifests.push_back(std::move(manifest));
  }
  return manifests;
}

}  // namespace mlock::cli
