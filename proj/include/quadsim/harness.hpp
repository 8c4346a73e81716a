#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace quadsim::harness {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by the library and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCompareFail = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPhysicsError = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;              // human-readable status / error
  std::vector<std::string> files;   // files written (empty on failure)
};

// Executes a run config (or a {"runs": [...]} bundle with optional
// {"derived": [...]} post-processing steps) and writes one CSV per requested
// measure plus a metadata sidecar into out_dir. No files are written unless
// the whole config validates and every run succeeds. CSV bodies are
// byte-identical regardless of worker count.
RunOutcome run_config_json(const nlohmann::json& config,
                           const std::string& out_dir);
RunOutcome run_config_file(const std::string& config_path,
                           const std::string& out_dir);

std::vector<std::string> preset_names();
// Materializes the named preset into a config bundle; throws ConfigError on
// unknown names. full_scale switches the expensive lattice preset to its
// publication-scale parameters.
nlohmann::json preset_config(const std::string& name, bool full_scale);

struct CompareReport {
  bool pass = false;
  double max_abs_dev = 0.0;
  double max_rel_dev = 0.0;
  std::string detail;
};

// Compares the value column of two CSV tables produced by run/preset. Keys
// (all non-value columns) must match exactly; each value pair must satisfy
// |a-b| <= abs_tol + rel_tol*|b|. Tolerance spec: "abs=X[,rel=Y]" or
// "rel=Y[,abs=X]". Throws ConfigError on malformed inputs.
CompareReport compare_tables(const std::string& csv_a, const std::string& csv_b,
                             const std::string& tol_spec);

// FNV-1a 64-bit hash of the canonical (sorted-key) JSON dump, as hex.
std::string config_hash(const nlohmann::json& config);

}  // namespace quadsim::harness
