#include "hyperlearn/learner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>

#include <json.hpp>

#include "hyperlearn/kernels.hpp"

namespace hyperlearn {

void Hyperparams::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Config, what); };
  if (!(gamma >= 0.0 && gamma <= 1.0)) bad("gamma must lie in [0, 1]");
  if (!(learning_rate > 0.0)) bad("learning_rate must be positive");
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
    bad("need 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (xi < 1) bad("episodes must be at least 1");
  if (mlp_layers < 1 || mlp_width < 1) bad("mlp_layers and mlp_width must be positive");
  if (replay_capacity < 1 || batch_size < 1) bad("replay_capacity and batch_size must be positive");
  if (!(robustness.rho_max > 0.0)) bad("rho_max must be positive");
}

double Hyperparams::epsilon(int episode) const {
  const int span = epsilon_decay_episodes >= 0 ? epsilon_decay_episodes : static_cast<int>(0.8 * xi);
  if (span <= 0 || episode >= span) return epsilon_end;
  const double frac = static_cast<double>(episode) / static_cast<double>(span);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

int argmax(const std::vector<double>& values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = static_cast<int>(i);
  return best;
}

// ------------------------------------------------------------------ tabular

std::vector<double> TabularQ::values(const Observation& s) const {
  auto it = table_.find(s.key);
  return it == table_.end() ? std::vector<double>(num_actions_, 0.0) : it->second;
}

double TabularQ::get(const std::string& key, int a) const {
  auto it = table_.find(key);
  return it == table_.end() ? 0.0 : it->second[a];
}

void TabularQ::set(const std::string& key, int a, double v) {
  auto [it, fresh] = table_.try_emplace(key);
  if (fresh) it->second.assign(num_actions_, 0.0);
  it->second[a] = v;
}

void TabularQ::update(const Observation& s, int a, double r, const Observation* next, const Hyperparams& h) {
  double target = r;
  if (next) {
    auto v = values(*next);
    target += h.gamma * *std::max_element(v.begin(), v.end());
  }
  const double q = get(s.key, a);
  set(s.key, a, q + h.learning_rate * (target - q));
}

void q_update(QFunction& q, const Observation& s, int a, double r, const Observation* next, const Hyperparams& h) {
  q.update(s, a, r, next, h);
}

// ---------------------------------------------------------------------- mlp

MlpQ::MlpQ(int inputs, int num_actions, int layers, int width, std::uint64_t seed)
    : inputs_(inputs), num_actions_(num_actions) {
  std::mt19937_64 rng(seed);
  int in = inputs;
  for (int l = 0; l <= layers; ++l) {
    Layer layer;
    layer.in = in;
    layer.out = l == layers ? num_actions : width;
    std::normal_distribution<float> init(0.0f, std::sqrt(2.0f / static_cast<float>(in)));
    layer.w.resize(static_cast<std::size_t>(layer.out) * layer.in);
    for (auto& w : layer.w) w = init(rng);
    if (l == layers)
      for (auto& w : layer.w) w *= 0.1f;
    layer.b.assign(layer.out, 0.0f);
    in = layer.out;
    layers_.push_back(std::move(layer));
  }
}

std::size_t MlpQ::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

void MlpQ::forward(const std::vector<float>& x, std::vector<std::vector<float>>& acts) const {
  const auto& k = kernels::active();
  acts.resize(layers_.size() + 1);
  acts[0] = x;
  acts[0].resize(inputs_, 0.0f);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& L = layers_[l];
    acts[l + 1].resize(L.out);
    k.gemv(L.w.data(), acts[l].data(), L.b.data(), acts[l + 1].data(), L.out, L.in);
    if (l + 1 < layers_.size()) k.relu(acts[l + 1].data(), acts[l + 1].size());
  }
}

std::vector<double> MlpQ::values(const Observation& s) const {
  std::vector<std::vector<float>> acts;
  forward(s.features, acts);
  return {acts.back().begin(), acts.back().end()};
}

void MlpQ::update(const Observation& s, int a, double r, const Observation* next, const Hyperparams& h) {
  double target = r;
  if (next) {
    auto v = values(*next);
    target += h.gamma * *std::max_element(v.begin(), v.end());
  }
  std::vector<std::vector<float>> acts;
  forward(s.features, acts);
  const auto& k = kernels::active();
  const float lr = static_cast<float>(h.learning_rate);
  // d(0.5 * err^2)/d q_a = q_a - target; only output a carries gradient
  std::vector<float> grad(num_actions_, 0.0f);
  grad[a] = static_cast<float>(acts.back()[a] - target);
  for (std::size_t l = layers_.size(); l-- > 0;) {
    Layer& L = layers_[l];
    const std::vector<float>& in = acts[l];
    std::vector<float> back(L.in, 0.0f);
    for (int o = 0; o < L.out; ++o) {
      if (grad[o] == 0.0f) continue;
      float* row = L.w.data() + static_cast<std::size_t>(o) * L.in;
      k.axpy(grad[o], row, back.data(), L.in);
      k.axpy(-lr * grad[o], in.data(), row, L.in);
      L.b[o] -= lr * grad[o];
    }
    if (l > 0) {
      for (int i = 0; i < L.in; ++i) back[i] = acts[l][i] > 0.0f ? back[i] : 0.0f;  // ReLU'
    }
    grad = std::move(back);
  }
}

// ------------------------------------------------------------ joint actions

JointAction decode_joint(int index, int num_actions, std::size_t arity) {
  JointAction a;
  a.per_trace.assign(arity, 0);
  for (std::size_t k = arity; k-- > 0;) {
    a.per_trace[k] = index % num_actions;
    index /= num_actions;
  }
  return a;
}

int encode_joint(const JointAction& a, int num_actions) {
  int index = 0;
  for (int x : a.per_trace) index = index * num_actions + x;
  return index;
}

// ------------------------------------------------------------------ monitor

EpisodeMonitor::EpisodeMonitor(const Environment& env, const SkolemizedFormula& sk, RobustnessConfig cfg)
    : env_(env), sk_(sk), cfg_(cfg), eval_(sk.body, sk.arity(), cfg) {
  if (env.arity() != sk.arity()) {
    throw Error(ErrorKind::ArityMismatch, "environment has " + std::to_string(env.arity()) +
                                              " traces, formula quantifies " + std::to_string(sk.arity()));
  }
}

void EpisodeMonitor::reset(const JointState& s0) {
  path_.clear();
  eval_.clear();
  push(s0);
}

void EpisodeMonitor::push(const JointState& s) {
  path_.push_back(s);
  if (env_.state_aligned_traces()) {
    eval_.append(env_.label_of(s));
  } else {
    eval_.clear();
    const auto traces = env_.traces_of(path_);
    for (std::size_t i = 0; i < traces.front().size(); ++i) {
      std::vector<Label> column;
      for (const auto& t : traces) column.push_back(t[i]);
      eval_.append(column);
    }
  }
  refresh();
}

void EpisodeMonitor::refresh() { current_ = eval_.eval(); }

std::vector<double> EpisodeMonitor::signature() { return eval_.monitor_signature(); }

Observation observe(const Environment& env, const JointState& s, EpisodeMonitor& monitor, const Hyperparams& h) {
  Observation o;
  o.key = env.observation_key(s);
  o.features = env.features(s);
  if (h.monitor_key) {
    o.key += '|';
    char buf[32];
    for (double v : monitor.signature()) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      o.key.append(buf, p);
      o.key += ',';
      o.features.push_back(static_cast<float>(v / h.robustness.rho_max));
    }
  }
  return o;
}

// ----------------------------------------------------------------- policies

int PolicySet::action(std::size_t slot, const std::string& own_prefix) const {
  if (slot >= per_trace.size()) return 0;
  auto it = per_trace[slot].find(own_prefix);
  return it == per_trace[slot].end() ? 0 : it->second;
}

std::string PolicySet::to_json() const {
  nlohmann::json j;
  j["action_names"] = action_names;
  auto slots = nlohmann::json::array();
  for (const auto& m : per_trace) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, a] : m) o[k] = a;
    slots.push_back(std::move(o));
  }
  j["per_trace"] = std::move(slots);
  return j.dump(1);
}

PolicySet PolicySet::from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    PolicySet p;
    p.action_names = j.at("action_names").get<std::vector<std::string>>();
    for (const auto& o : j.at("per_trace")) {
      std::map<std::string, int> m;
      for (auto it = o.begin(); it != o.end(); ++it) m[it.key()] = it.value().get<int>();
      p.per_trace.push_back(std::move(m));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed policy file: ") + e.what());
  }
}

namespace {

std::string own_prefix_key(const Environment& env, const std::vector<JointState>& states, std::size_t slot) {
  std::string key;
  for (const auto& s : states) {
    key += env.observation_key(s, static_cast<int>(slot));
    key += '/';
  }
  return key;
}

void finish_record(const Environment& env, EpisodeRecord& rec) {
  rec.traces = env.traces_of(rec.states);
  rec.terminal_robustness = rec.robustness.empty() ? 0.0 : rec.robustness.back();
}

template <class ChooseFn>
EpisodeRecord rollout(const Environment& env, const SkolemizedFormula& sk, const RobustnessConfig& cfg,
                      std::uint64_t seed, ChooseFn&& choose) {
  EpisodeMonitor monitor(env, sk, cfg);
  EpisodeRecord rec;
  rec.seed = seed;
  JointState s = env.reset(seed);
  monitor.reset(s);
  rec.states.push_back(s);
  rec.robustness.push_back(monitor.robustness());
  while (s.step_count < env.beta() && !env.terminal(s)) {
    JointAction a = choose(s, monitor, rec);
    s = env.step(s, a);
    monitor.push(s);
    rec.actions.push_back(a);
    rec.states.push_back(s);
    rec.robustness.push_back(monitor.robustness());
  }
  finish_record(env, rec);
  return rec;
}

}  // namespace

EpisodeRecord greedy_rollout(const QFunction& q, const Environment& env, const SkolemizedFormula& sk,
                             const Hyperparams& h, std::uint64_t seed) {
  return rollout(env, sk, h.robustness, seed, [&](const JointState& s, EpisodeMonitor& m, const EpisodeRecord&) {
    return decode_joint(argmax(q.values(observe(env, s, m, h))), env.num_actions(), env.arity());
  });
}

EpisodeRecord greedy_rollout(const PolicySet& p, const Environment& env, const SkolemizedFormula& sk,
                             const RobustnessConfig& cfg, std::uint64_t seed) {
  return rollout(env, sk, cfg, seed, [&](const JointState&, EpisodeMonitor&, const EpisodeRecord& rec) {
    JointAction a;
    for (std::size_t k = 0; k < env.arity(); ++k) {
      int x = p.action(k, own_prefix_key(env, rec.states, k));
      a.per_trace.push_back(x < env.num_actions() ? x : 0);
    }
    return a;
  });
}

std::vector<Trace> assignment_of(const EpisodeRecord& ep) { return ep.traces; }

std::pair<PolicySet, std::vector<WitnessTable>> extract_policies(const Environment& env, const SkolemizedFormula& sk,
                                                                 const std::vector<EpisodeRecord>& episodes) {
  PolicySet p;
  p.action_names = env.action_names();
  p.per_trace.resize(env.arity());
  std::vector<WitnessTable> witnesses;
  for (const auto& d : sk.decls) witnesses.emplace_back(d.exist_index, d.deps);
  for (const auto& ep : episodes) {
    std::vector<JointState> prefix;
    for (std::size_t t = 0; t < ep.states.size(); ++t) {
      prefix.push_back(ep.states[t]);
      if (t < ep.actions.size()) {
        for (std::size_t k = 0; k < env.arity(); ++k) {
          p.per_trace[k][own_prefix_key(env, prefix, k)] = ep.actions[t].per_trace[k];
        }
      }
      if (witnesses.empty()) continue;
      const auto traces = env.traces_of(prefix);
      for (auto& w : witnesses) {
        std::vector<Trace> univ;
        for (int u : w.deps()) univ.push_back(traces[u - 1]);
        std::vector<int> acts;
        for (std::size_t i = 0; i < t; ++i) acts.push_back(ep.actions[i].per_trace[w.exist_index() - 1]);
        w.record(std::move(univ), traces[w.exist_index() - 1], std::move(acts));
      }
    }
  }
  return {std::move(p), std::move(witnesses)};
}

// ------------------------------------------------------------------ metrics

std::vector<std::string> metric_columns(EnvKind kind) {
  switch (kind) {
    case EnvKind::Grid:
    case EnvKind::Wildfire: return {"episode", "total_done", "total_col"};
    case EnvKind::Pcp: return {"episode", "tot_done"};
    case EnvKind::Resource: return {"episode", "min", "max", "avg"};
  }
  return {"episode"};
}

namespace {

bool all_goals_visited(const GridWorld& g, const EpisodeRecord& ep) {
  for (std::size_t k = 0; k < g.arity(); ++k) {
    bool seen = false;
    for (const auto& s : ep.states) seen = seen || g.on_goal(s, k);
    if (!seen) return false;
  }
  return true;
}

int collision_steps(const GridWorld& g, const EpisodeRecord& ep) {
  int n = 0;
  for (std::size_t t = 1; t < ep.states.size(); ++t) n += g.collision(ep.states[t]) ? 1 : 0;
  return n;
}

// A trace whose chosen dominoes spell equal words at any step of the episode.
bool validated_match(const PcpWorld& p, const EpisodeRecord& ep) {
  for (const auto& s : ep.states) {
    for (const auto& st : s.per_trace) {
      if (is_match(p.dominoes(), PcpWorld::chosen(st))) return true;
    }
  }
  return false;
}

}  // namespace

bool episode_success(const Environment& env, const SkolemizedFormula& sk, const EpisodeRecord& ep,
                     const RobustnessConfig& cfg) {
  switch (env.kind()) {
    case EnvKind::Grid: {
      const auto& g = dynamic_cast<const GridWorld&>(env);
      return all_goals_visited(g, ep) && collision_steps(g, ep) == 0;
    }
    case EnvKind::Wildfire:
      return sat_verdict(ep.terminal_robustness, cfg, sk.body) == Verdict::Satisfied;
    case EnvKind::Pcp: return validated_match(dynamic_cast<const PcpWorld&>(env), ep);
    case EnvKind::Resource: {
      const auto& r = dynamic_cast<const ResourceWorld&>(env);
      std::int64_t lo = INT64_MAX, hi = INT64_MIN;
      for (const auto& a : ep.states.back().per_trace) {
        lo = std::min(lo, ResourceWorld::energy(a));
        hi = std::max(hi, ResourceWorld::energy(a));
      }
      return hi - lo < r.delta() && static_cast<double>(lo) >= 0.6 * (env.beta() / 2.0);
    }
  }
  return false;
}

// -------------------------------------------------------------------- train

TrainResult train(const Environment& env, const Formula& f, const Hyperparams& h, std::uint64_t seed) {
  h.validate();
  if (env.arity() != f.arity()) {
    throw Error(ErrorKind::ArityMismatch, "environment has " + std::to_string(env.arity()) +
                                              " traces, formula quantifies " + std::to_string(f.arity()));
  }
  const SkolemizedFormula sk = skolemize(f);
  const int joint = static_cast<int>(std::pow(env.num_actions(), static_cast<double>(env.arity())));
  std::mt19937_64 rng(seed);

  TrainResult out;
  EpisodeMonitor monitor(env, sk, h.robustness);
  if (h.approximator == ApproximatorKind::Tabular) {
    out.q = std::make_unique<TabularQ>(joint);
  } else {
    JointState s0 = env.reset(seed);
    monitor.reset(s0);
    const int inputs = static_cast<int>(observe(env, s0, monitor, h).features.size());
    out.q = std::make_unique<MlpQ>(inputs, joint, h.mlp_layers, h.mlp_width, rng());
  }

  struct Transition {
    Observation s;
    int a;
    double r;
    Observation next;
    bool terminal;
  };
  std::deque<Transition> replay;

  out.metrics.columns = metric_columns(env.kind());
  out.metrics.columns.push_back("robustness");
  double cumulative = 0.0;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_action(0, joint - 1);

  for (int ep = 0; ep < h.xi; ++ep) {
    const double eps = h.epsilon(ep);
    EpisodeRecord rec;
    rec.seed = seed + static_cast<std::uint64_t>(ep);
    JointState s = env.reset(rec.seed);
    monitor.reset(s);
    rec.states.push_back(s);
    rec.robustness.push_back(monitor.robustness());
    Observation obs = observe(env, s, monitor, h);
    while (s.step_count < env.beta() && !env.terminal(s)) {
      int a = coin(rng) < eps ? any_action(rng) : argmax(out.q->values(obs));
      const JointAction ja = decode_joint(a, env.num_actions(), env.arity());
      JointState next = env.step(s, ja);
      const double before = monitor.robustness();
      monitor.push(next);
      double r = monitor.robustness();
      if (h.reward_mode == RewardMode::DifferentialRobustness) r -= before;
      if (h.reward_mode == RewardMode::Baseline) r = baseline_reward(h.baseline_kind, env, s, ja, next);
      const bool done = env.terminal(next);
      Observation next_obs = observe(env, next, monitor, h);
      if (h.approximator == ApproximatorKind::Tabular) {
        q_update(*out.q, obs, a, r, done ? nullptr : &next_obs, h);
      } else {
        replay.push_back({obs, a, r, next_obs, done});
        if (static_cast<int>(replay.size()) > h.replay_capacity) replay.pop_front();
        if (static_cast<int>(replay.size()) >= h.batch_size) {
          std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
          for (int b = 0; b < h.batch_size; ++b) {
            const Transition& t = replay[pick(rng)];
            q_update(*out.q, t.s, t.a, t.r, t.terminal ? nullptr : &t.next, h);
          }
        }
      }
      rec.actions.push_back(ja);
      rec.states.push_back(next);
      rec.robustness.push_back(monitor.robustness());
      s = std::move(next);
      obs = std::move(next_obs);
    }
    finish_record(env, rec);
    const bool ok = episode_success(env, sk, rec, h.robustness);
    out.metrics.success.push_back(ok);
    if (ok && !out.first_success) out.first_success = rec;

    std::vector<double> row{static_cast<double>(ep + 1)};
    switch (env.kind()) {
      case EnvKind::Grid:
      case EnvKind::Wildfire: {
        const auto& g = dynamic_cast<const GridWorld&>(env);
        const bool done = env.kind() == EnvKind::Grid ? all_goals_visited(g, rec) : ok;
        cumulative += done ? 1.0 : 0.0;
        row.push_back(cumulative);
        row.push_back(collision_steps(g, rec));
        break;
      }
      case EnvKind::Pcp:
        cumulative += ok ? 1.0 : 0.0;
        row.push_back(cumulative);
        break;
      case EnvKind::Resource: {
        double lo = 1e300, hi = -1e300, sum = 0.0;
        for (const auto& a : rec.states.back().per_trace) {
          const double e = static_cast<double>(ResourceWorld::energy(a));
          lo = std::min(lo, e);
          hi = std::max(hi, e);
          sum += e;
        }
        row.insert(row.end(), {lo, hi, sum / static_cast<double>(env.arity())});
        break;
      }
    }
    row.push_back(rec.terminal_robustness);
    out.metrics.rows.push_back(std::move(row));
  }

  out.final_rollout = greedy_rollout(*out.q, env, sk, h, seed);
  auto [policies, witnesses] = extract_policies(env, sk, {out.final_rollout});
  out.policies = std::move(policies);
  out.witnesses = std::move(witnesses);
  return out;
}

}  // namespace hyperlearn
