#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperlearn/learner.hpp"

namespace hyperlearn {

/// What the environment section of a config builds.
struct EnvSpec {
  EnvKind kind = EnvKind::Grid;
  std::filesystem::path map_path;       // grid and resource
  std::filesystem::path dominoes_path;  // pcp
  std::size_t agents = 2;
  int beta = 8;
  int delta = 10;                       // resource
  int max_dominoes = 5;                 // pcp
};

/// INI file with a top-level `name` and `formula`, plus [environment],
/// [hyperparams] and [run] sections. Input paths are relative to the config
/// file; output_dir is relative to the working directory.
struct ExperimentConfig {
  std::filesystem::path source;
  std::string name;
  std::filesystem::path formula_path;
  EnvSpec env;
  Hyperparams hyper;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> seeds;  // explicit list; overrides base_seed
  std::filesystem::path output_dir;
  int threads = 0;                   // 0: hardware concurrency

  /// Seed of repetition i: seeds[i] when listed, otherwise base_seed + i.
  std::uint64_t seed_of(int rep) const;
};

/// Throws Config on unknown keys, bad values or missing referenced files.
ExperimentConfig load_config(const std::filesystem::path& path);

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

struct RepetitionSummary {
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::Violated;  // of the final greedy rollout
  double terminal_robustness = 0.0;
  bool greedy_success = false;          // environment-specific success of the greedy rollout
  int first_success_episode = 0;        // 1-based, 0 when no training episode succeeded
  double seconds = 0.0;
};

struct RunSummary {
  std::string name;
  std::vector<RepetitionSummary> reps;
  double satisfaction_rate = 0.0;
  double mean_terminal_robustness = 0.0;
  double seconds = 0.0;

  std::string to_json() const;
};

struct Repetition {
  RepetitionSummary summary;
  TrainResult result;
};

struct RunOutput {
  RunSummary summary;
  std::vector<Repetition> reps;
};

/// Trains every repetition (concurrently, each with its own environment and
/// RNG) and, when `write` is set, fills cfg.output_dir with rep_<i>.csv,
/// rep_<i>_policy.json, aggregate.csv and summary.json.
RunOutput run_experiment(const ExperimentConfig& cfg, bool write = true);

/// Shortest round-trip decimal form.
std::string format_number(double v);
std::string metrics_csv(const TrainMetrics& m);
/// Per-episode means over repetitions; throws Config on mismatched shapes.
std::string aggregate_csv(const std::vector<const TrainMetrics*>& runs);

std::string policy_artifact_json(const Repetition& rep, const SkolemizedFormula& sk);

struct PolicyArtifact {
  std::uint64_t seed = 0;
  PolicySet policies;
  std::vector<WitnessTable> witnesses;
};

/// Throws ArtifactMissing when the file is absent.
PolicyArtifact load_policy_artifact(const std::filesystem::path& path);

// Command entry points. Exit codes: 0 success or Satisfied, 1 violation or
// diagnostics, 2 usage or config errors.
constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct TrainOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<std::filesystem::path> out;
};

/// Output directory precedence: --out, then HYPERLEARN_OUT_DIR, then config.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const TrainOverrides& o);

int cmd_check(const std::filesystem::path& formula_path, std::ostream& out, std::ostream& err);
int cmd_skolemize(const std::filesystem::path& formula_path, std::ostream& out, std::ostream& err);
int cmd_train(const std::filesystem::path& config_path, const TrainOverrides& o, std::ostream& out,
              std::ostream& err);
int cmd_eval(const std::filesystem::path& policy_path, const std::filesystem::path& config_path,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);
int cmd_oracle_pcp(const std::filesystem::path& dominoes_path, int max_len, std::ostream& out, std::ostream& err);
int cmd_oracle_boolean(const std::filesystem::path& traces_path, const std::filesystem::path& formula_path,
                       std::ostream& out, std::ostream& err);

}  // namespace hyperlearn
