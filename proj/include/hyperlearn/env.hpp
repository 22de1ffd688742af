#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hyperlearn/trace.hpp"

namespace hyperlearn {

/// Opaque to the learner: only environments read the fields.
struct AgentState {
  std::vector<std::int64_t> fields;

  bool operator==(const AgentState&) const = default;
  auto operator<=>(const AgentState&) const = default;
};

struct JointState {
  std::vector<AgentState> per_trace;
  std::vector<std::int64_t> shared;  // world state common to all traces
  int step_count = 0;

  bool operator==(const JointState&) const = default;
};

struct JointAction {
  std::vector<int> per_trace;

  bool operator==(const JointAction&) const = default;
};

/// Named numeric views of one agent's state.
class ValuationRegistry {
 public:
  using Fn = std::function<double(const AgentState&)>;

  void add(std::string name, Fn fn) { entries_[std::move(name)] = std::move(fn); }
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const std::map<std::string, Fn>& entries() const { return entries_; }
  void fill(const AgentState& s, Label& out) const {
    for (const auto& [name, fn] : entries_) out.valuations[name] = fn(s);
  }

 private:
  std::map<std::string, Fn> entries_;
};

enum class EnvKind { Grid, Wildfire, Pcp, Resource };

const char* to_string(EnvKind k);

/// Black-box multi-trace MDP. step is const: it returns a fresh state and
/// never touches its argument, so dynamics stay hidden behind the interface.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvKind kind() const = 0;
  virtual std::size_t arity() const = 0;
  virtual int num_actions() const = 0;
  virtual std::vector<std::string> action_names() const = 0;
  int beta() const { return beta_; }

  virtual JointState reset(std::uint64_t seed) const = 0;

  /// Throws EpisodeExhausted once step_count reaches beta or the state is
  /// terminal, InvalidAction on out-of-range or mis-sized actions.
  JointState step(const JointState& s, const JointAction& a) const;

  virtual std::vector<Label> label_of(const JointState& s) const = 0;
  virtual bool terminal(const JointState& s) const { (void)s; return false; }

  /// One trace per slot for a path of joint states. The default emits one
  /// label per state; environments whose traces are not state-aligned
  /// override this.
  virtual std::vector<Trace> traces_of(const std::vector<JointState>& path) const;

  /// True when traces_of emits exactly label_of of each state, which lets
  /// monitors extend their traces one column at a time.
  virtual bool state_aligned_traces() const { return true; }

  /// Compact encoding of what the learner may condition on for slot k (or
  /// for the whole joint state when slot < 0).
  virtual std::string observation_key(const JointState& s, int slot = -1) const;

  /// Real-valued features for function approximation.
  virtual std::vector<float> features(const JointState& s) const = 0;

  const ValuationRegistry& valuations() const { return registry_; }

 protected:
  explicit Environment(int beta) : beta_(beta) {}
  virtual JointState transition(const JointState& s, const JointAction& a) const = 0;

  ValuationRegistry registry_;

 private:
  int beta_;
};

struct EpisodeRecord {
  std::vector<JointState> states;     // s0 .. s_n
  std::vector<JointAction> actions;   // a0 .. a_{n-1}
  std::vector<Trace> traces;          // one per slot
  std::vector<double> robustness;     // prefix robustness after each state
  double terminal_robustness = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace hyperlearn
