#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperlearn/env.hpp"
#include "hyperlearn/robustness.hpp"
#include "hyperlearn/skolem.hpp"
#include "hyperlearn/worlds.hpp"

namespace hyperlearn {

enum class RewardMode { PrefixRobustness, DifferentialRobustness, Baseline };
enum class ApproximatorKind { Tabular, Mlp };

struct Hyperparams {
  double gamma = 0.99;
  double learning_rate = 0.001;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = -1;  // < 0: 80% of xi
  int xi = 1000;
  RewardMode reward_mode = RewardMode::PrefixRobustness;
  BaselineKind baseline_kind = BaselineKind::SafeRL;
  ApproximatorKind approximator = ApproximatorKind::Tabular;
  int mlp_layers = 2;
  int mlp_width = 64;
  int replay_capacity = 10000;
  int batch_size = 32;
  bool monitor_key = true;  // append the robustness monitor signature to tabular keys
  RobustnessConfig robustness;

  /// Throws Config on out-of-range values.
  void validate() const;
  double epsilon(int episode) const;
};

/// What the approximators see of a joint state.
struct Observation {
  std::string key;
  std::vector<float> features;
};

/// Lowest index wins ties.
int argmax(const std::vector<double>& values);

class QFunction {
 public:
  virtual ~QFunction() = default;
  virtual int num_actions() const = 0;
  virtual std::vector<double> values(const Observation& s) const = 0;
  /// One Bellman backup; `next` is null on true termination so nothing is
  /// bootstrapped.
  virtual void update(const Observation& s, int a, double r, const Observation* next, const Hyperparams& h) = 0;
};

class TabularQ : public QFunction {
 public:
  explicit TabularQ(int num_actions) : num_actions_(num_actions) {}

  int num_actions() const override { return num_actions_; }
  std::vector<double> values(const Observation& s) const override;
  void update(const Observation& s, int a, double r, const Observation* next, const Hyperparams& h) override;

  double get(const std::string& key, int a) const;
  void set(const std::string& key, int a, double v);
  std::size_t size() const { return table_.size(); }

 private:
  int num_actions_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

/// Feed-forward ReLU network, one output per joint action, trained by plain
/// SGD on the squared temporal-difference error.
class MlpQ : public QFunction {
 public:
  MlpQ(int inputs, int num_actions, int layers, int width, std::uint64_t seed);

  int num_actions() const override { return num_actions_; }
  std::vector<double> values(const Observation& s) const override;
  void update(const Observation& s, int a, double r, const Observation* next, const Hyperparams& h) override;

  std::size_t parameter_count() const;

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    std::vector<float> w;  // out x in, row-major
    std::vector<float> b;
  };
  void forward(const std::vector<float>& x, std::vector<std::vector<float>>& acts) const;

  int inputs_;
  int num_actions_;
  std::vector<Layer> layers_;
};

/// Tabular Q update written out for direct testing:
/// Q(s,a) <- Q(s,a) + lr * (r + gamma * max_a' Q(s',a') - Q(s,a)).
void q_update(QFunction& q, const Observation& s, int a, double r, const Observation* next, const Hyperparams& h);

JointAction decode_joint(int index, int num_actions, std::size_t arity);
int encode_joint(const JointAction& a, int num_actions);

/// Tracks prefix robustness of the Skolemized body along one episode.
class EpisodeMonitor {
 public:
  EpisodeMonitor(const Environment& env, const SkolemizedFormula& sk, RobustnessConfig cfg);

  void reset(const JointState& s0);
  void push(const JointState& s);
  double robustness() const { return current_; }
  std::vector<double> signature();
  const std::vector<JointState>& path() const { return path_; }

 private:
  void refresh();

  const Environment& env_;
  const SkolemizedFormula& sk_;
  RobustnessConfig cfg_;
  RowEvaluator eval_;
  std::vector<JointState> path_;
  double current_ = 0.0;
};

/// Per trace, the action for each own-prefix: policy i reads only the
/// observation history of trace i, as in pi_i(zeta_i[0:t]).
struct PolicySet {
  std::vector<std::map<std::string, int>> per_trace;
  std::vector<std::string> action_names;

  int action(std::size_t slot, const std::string& own_prefix) const;  // fallback 0
  std::string to_json() const;
  static PolicySet from_json(const std::string& text);
};

struct TrainMetrics {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<bool> success;  // per episode, environment-specific success
};

struct TrainResult {
  std::unique_ptr<QFunction> q;
  PolicySet policies;
  std::vector<WitnessTable> witnesses;
  TrainMetrics metrics;
  EpisodeRecord final_rollout;
  std::optional<EpisodeRecord> first_success;  // earliest successful training episode
};

Observation observe(const Environment& env, const JointState& s, EpisodeMonitor& monitor, const Hyperparams& h);

/// Environment-specific CSV columns (without the trailing robustness column).
std::vector<std::string> metric_columns(EnvKind kind);

/// Success of one finished episode: all goals visited with no collision
/// (grid), formula satisfied (wildfire), a validated match (pcp), or energies
/// within delta of each other (resource).
bool episode_success(const Environment& env, const SkolemizedFormula& sk, const EpisodeRecord& ep,
                     const RobustnessConfig& cfg);

/// Throws ArityMismatch when env and formula arities differ.
TrainResult train(const Environment& env, const Formula& f, const Hyperparams& h, std::uint64_t seed);

EpisodeRecord greedy_rollout(const QFunction& q, const Environment& env, const SkolemizedFormula& sk,
                             const Hyperparams& h, std::uint64_t seed);
EpisodeRecord greedy_rollout(const PolicySet& p, const Environment& env, const SkolemizedFormula& sk,
                             const RobustnessConfig& cfg, std::uint64_t seed);

/// Projects rollouts onto per-trace policies and records Skolem witnesses
/// f_i(universal prefixes at t) = existential prefix at t for every t.
std::pair<PolicySet, std::vector<WitnessTable>> extract_policies(const Environment& env, const SkolemizedFormula& sk,
                                                                 const std::vector<EpisodeRecord>& episodes);

/// Assignment (traces by quantifier position) of a finished episode.
std::vector<Trace> assignment_of(const EpisodeRecord& ep);

}  // namespace hyperlearn
