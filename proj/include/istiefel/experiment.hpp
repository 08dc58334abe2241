#pragma once

#include "istiefel/optimizer.hpp"
#include "istiefel/problems.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace istiefel {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings for one experiment. Every field has a config-file key and a CLI
/// flag of the same name (e.g. `max-iter = 500` and `--max-iter 500`); `_`
/// and `-` are interchangeable in keys.
struct ExperimentConfig {
  std::string problem = "tracemin";  // tracemin | lrevp | procrustes | matexeq
  Index n = 0, p = 0, m = 0, k = 0, kp = 0, km = 0, l = 0;
  std::string matrix = "lehmer";
  std::optional<double> matrix_param;
  std::string metric = "hessian";
  std::string retraction;  // empty: chosen from (n, k)
  double rstop = 1e-9;
  int max_iter = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string mtx_k, mtx_m;  // lrevp pencil from Matrix Market files
  std::string a_layout = "increasing";
  std::string init;  // empty: problem default
  std::string bb_inner = "euclidean";
  std::string verify_a = "indefinite";  // indefinite | spd | singular
  int seeds = 10;

  /// Sets one field from its textual key and value; throws ConfigError.
  void set(std::string_view key, std::string_view value);
  /// `key = value` lines; `#` starts a comment.
  void read(std::istream& in);
  void read(const std::filesystem::path& path);
  /// Fills derived sizes (n = p + m, k = kp + km, ...) and checks consistency
  /// before anything is allocated. Throws ConfigError naming the violated
  /// condition.
  void resolve();
  /// key = value lines accepted by read().
  void write(std::ostream& out) const;

  SolverConfig solver_config() const;
};

/// Problem, starting point and reference point described by a resolved config.
Instance build_instance(const ExperimentConfig& config);

struct RunOutcome {
  RunRecord record;
  nlohmann::json summary;
  int exit_code = 0;  // 0 converged, 2 max_iter, 3 stalled
};

int exit_code(RunStatus status);

/// Solves the configured instance. When `write_files` is set, writes
/// summary.json, history.csv, config.txt and x_final.mtx into out_dir.
RunOutcome run_experiment(const ExperimentConfig& config, bool write_files = true);

struct BatchOutcome {
  std::vector<RunOutcome> runs;
  nlohmann::json mean;
  int exit_code = 0;  // largest exit code over the runs
};

/// `seeds` runs with seeds seed, seed+1, ...; per-seed outputs go to
/// out_dir/seed_<s>/ and the table with its mean row to out_dir/batch.csv.
BatchOutcome run_batch(const ExperimentConfig& config, bool write_files = true);

struct VerifyItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool all_passed() const;
};

/// Property suite on a small instance; prints one line per check to `out`.
VerifyReport run_verify(const ExperimentConfig& config, std::ostream& out);

}  // namespace istiefel
