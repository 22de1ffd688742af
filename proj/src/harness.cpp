#include "hyperlearn/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

namespace hyperlearn {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::Config, what); }

template <class T>
T get_value(const pt::ptree& node, const std::string& key) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_error&) {
    config_error("bad value '" + node.data() + "' for " + key);
  }
}

bool get_bool(const pt::ptree& node, const std::string& key) {
  const std::string v = node.data();
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error("bad boolean '" + v + "' for " + key);
}

EnvKind parse_env_kind(const std::string& s) {
  if (s == "grid") return EnvKind::Grid;
  if (s == "wildfire") return EnvKind::Wildfire;
  if (s == "pcp") return EnvKind::Pcp;
  if (s == "resource") return EnvKind::Resource;
  config_error("unknown environment kind '" + s + "'");
}

RewardMode parse_reward_mode(const std::string& s) {
  if (s == "prefix") return RewardMode::PrefixRobustness;
  if (s == "differential") return RewardMode::DifferentialRobustness;
  if (s == "baseline") return RewardMode::Baseline;
  config_error("unknown reward_mode '" + s + "'");
}

BaselineKind parse_baseline(const std::string& s) {
  if (s == "saferl") return BaselineKind::SafeRL;
  if (s == "pcp") return BaselineKind::Pcp;
  config_error("unknown baseline '" + s + "'");
}

ApproximatorKind parse_approximator(const std::string& s) {
  if (s == "tabular") return ApproximatorKind::Tabular;
  if (s == "mlp") return ApproximatorKind::Mlp;
  config_error("unknown approximator '" + s + "'");
}

fs::path existing(const fs::path& base, const std::string& rel, const std::string& key) {
  fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
  if (!fs::exists(p)) config_error(key + " refers to missing file " + p.string());
  return p.lexically_normal();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
  out << text;
}

}  // namespace

std::uint64_t ExperimentConfig::seed_of(int rep) const {
  if (!seeds.empty()) return seeds.at(static_cast<std::size_t>(rep));
  return base_seed + static_cast<std::uint64_t>(rep);
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) config_error("config file " + path.string() + " does not exist");
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(e.what());
  }
  ExperimentConfig cfg;
  cfg.source = path;
  const fs::path base = path.parent_path();
  std::string map_rel, dominoes_rel;

  for (const auto& [key, node] : tree) {
    if (key == "name") {
      cfg.name = node.data();
    } else if (key == "formula") {
      cfg.formula_path = existing(base, node.data(), "formula");
    } else if (key == "environment") {
      for (const auto& [k, v] : node) {
        const std::string full = "environment." + k;
        if (k == "kind") cfg.env.kind = parse_env_kind(v.data());
        else if (k == "map") map_rel = v.data();
        else if (k == "dominoes") dominoes_rel = v.data();
        else if (k == "agents") cfg.env.agents = get_value<std::size_t>(v, full);
        else if (k == "beta") cfg.env.beta = get_value<int>(v, full);
        else if (k == "delta") cfg.env.delta = get_value<int>(v, full);
        else if (k == "max_dominoes") cfg.env.max_dominoes = get_value<int>(v, full);
        else config_error("unknown key " + full);
      }
    } else if (key == "hyperparams") {
      Hyperparams& h = cfg.hyper;
      for (const auto& [k, v] : node) {
        const std::string full = "hyperparams." + k;
        if (k == "gamma") h.gamma = get_value<double>(v, full);
        else if (k == "learning_rate") h.learning_rate = get_value<double>(v, full);
        else if (k == "epsilon_start") h.epsilon_start = get_value<double>(v, full);
        else if (k == "epsilon_end") h.epsilon_end = get_value<double>(v, full);
        else if (k == "epsilon_decay_episodes") h.epsilon_decay_episodes = get_value<int>(v, full);
        else if (k == "episodes") h.xi = get_value<int>(v, full);
        else if (k == "reward_mode") h.reward_mode = parse_reward_mode(v.data());
        else if (k == "baseline") h.baseline_kind = parse_baseline(v.data());
        else if (k == "approximator") h.approximator = parse_approximator(v.data());
        else if (k == "mlp_layers") h.mlp_layers = get_value<int>(v, full);
        else if (k == "mlp_width") h.mlp_width = get_value<int>(v, full);
        else if (k == "replay_capacity") h.replay_capacity = get_value<int>(v, full);
        else if (k == "batch_size") h.batch_size = get_value<int>(v, full);
        else if (k == "monitor_key") h.monitor_key = get_bool(v, full);
        else if (k == "rho_max") h.robustness.rho_max = get_value<double>(v, full);
        else config_error("unknown key " + full);
      }
    } else if (key == "run") {
      for (const auto& [k, v] : node) {
        const std::string full = "run." + k;
        if (k == "repetitions") cfg.repetitions = get_value<int>(v, full);
        else if (k == "base_seed") cfg.base_seed = get_value<std::uint64_t>(v, full);
        else if (k == "output_dir") cfg.output_dir = v.data();
        else if (k == "threads") cfg.threads = get_value<int>(v, full);
        else if (k == "seeds") {
          std::istringstream in(v.data());
          std::string tok;
          while (in >> tok) {
            std::uint64_t s = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), s);
            if (ec != std::errc{} || p != tok.data() + tok.size()) config_error("bad seed '" + tok + "'");
            cfg.seeds.push_back(s);
          }
        } else {
          config_error("unknown key " + full);
        }
      }
    } else {
      config_error("unknown key or section '" + key + "'");
    }
  }

  if (cfg.formula_path.empty()) config_error("missing formula");
  if (cfg.name.empty()) cfg.name = path.stem().string();
  if (cfg.output_dir.empty()) cfg.output_dir = fs::path("out") / cfg.name;
  if (cfg.repetitions < 1) config_error("repetitions must be at least 1");
  if (!cfg.seeds.empty() && cfg.seeds.size() < static_cast<std::size_t>(cfg.repetitions)) {
    config_error("seeds lists fewer entries than repetitions");
  }
  if (cfg.env.beta < 1) config_error("beta must be at least 1");
  switch (cfg.env.kind) {
    case EnvKind::Grid:
    case EnvKind::Resource:
      if (map_rel.empty()) config_error("environment.map is required for this kind");
      cfg.env.map_path = existing(base, map_rel, "environment.map");
      break;
    case EnvKind::Pcp:
      if (dominoes_rel.empty()) config_error("environment.dominoes is required for pcp");
      cfg.env.dominoes_path = existing(base, dominoes_rel, "environment.dominoes");
      break;
    case EnvKind::Wildfire: break;
  }
  cfg.hyper.validate();
  return cfg;
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
  switch (spec.kind) {
    case EnvKind::Grid: return std::make_unique<GridWorld>(load_map_file(spec.map_path), spec.agents, spec.beta);
    case EnvKind::Wildfire: return std::make_unique<WildfireWorld>(spec.beta);
    case EnvKind::Resource:
      return std::make_unique<ResourceWorld>(load_map_file(spec.map_path), spec.agents, spec.beta, spec.delta);
    case EnvKind::Pcp:
      return std::make_unique<PcpWorld>(load_dominoes_file(spec.dominoes_path), spec.max_dominoes, spec.agents);
  }
  throw Error(ErrorKind::Config, "unknown environment kind");
}

// ---------------------------------------------------------------- output

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string metrics_csv(const TrainMetrics& m) {
  std::string out;
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    if (c) out += ',';
    out += m.columns[c];
  }
  out += '\n';
  for (const auto& row : m.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string aggregate_csv(const std::vector<const TrainMetrics*>& runs) {
  if (runs.empty()) throw Error(ErrorKind::Config, "nothing to aggregate");
  TrainMetrics mean;
  mean.columns = runs.front()->columns;
  const std::size_t rows = runs.front()->rows.size();
  for (const auto* r : runs) {
    if (r->columns != mean.columns || r->rows.size() != rows) {
      throw Error(ErrorKind::Config, "repetitions disagree on CSV shape");
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row(mean.columns.size(), 0.0);
    for (const auto* r : runs) {
      for (std::size_t c = 0; c < row.size(); ++c) row[c] += r->rows[i][c];
    }
    for (auto& v : row) v /= static_cast<double>(runs.size());
    mean.rows.push_back(std::move(row));
  }
  return metrics_csv(mean);
}

std::string RunSummary::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["satisfaction_rate"] = satisfaction_rate;
  j["mean_terminal_robustness"] = mean_terminal_robustness;
  j["seconds"] = seconds;
  auto arr = nlohmann::json::array();
  for (const auto& r : reps) {
    arr.push_back({{"seed", r.seed},
                   {"verdict", to_string(r.verdict)},
                   {"terminal_robustness", r.terminal_robustness},
                   {"greedy_success", r.greedy_success},
                   {"first_success_episode", r.first_success_episode},
                   {"seconds", r.seconds}});
  }
  j["repetitions"] = std::move(arr);
  return j.dump(1) + "\n";
}

std::string policy_artifact_json(const Repetition& rep, const SkolemizedFormula& sk) {
  nlohmann::json j;
  j["seed"] = rep.summary.seed;
  j["skolemized"] = pretty(sk);
  j["policies"] = nlohmann::json::parse(rep.result.policies.to_json());
  auto ws = nlohmann::json::array();
  for (const auto& w : rep.result.witnesses) ws.push_back(nlohmann::json::parse(w.to_json()));
  j["witnesses"] = std::move(ws);
  return j.dump(1) + "\n";
}

PolicyArtifact load_policy_artifact(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::ArtifactMissing, "policy file " + path.string() + " does not exist");
  try {
    auto j = nlohmann::json::parse(read_text_file(path));
    PolicyArtifact a;
    a.seed = j.at("seed").get<std::uint64_t>();
    a.policies = PolicySet::from_json(j.at("policies").dump());
    for (const auto& w : j.at("witnesses")) a.witnesses.push_back(WitnessTable::from_json(w.dump()));
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, "malformed policy file " + path.string() + ": " + e.what());
  }
}

// ------------------------------------------------------------------ runs

RunOutput run_experiment(const ExperimentConfig& cfg, bool write) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  const Formula f = load_formula_file(cfg.formula_path);
  const SkolemizedFormula sk = skolemize(f);

  RunOutput out;
  out.reps.resize(static_cast<std::size_t>(cfg.repetitions));
  std::vector<std::exception_ptr> failures(out.reps.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < out.reps.size(); i = next++) {
      try {
        const auto t0 = clock::now();
        auto env = make_environment(cfg.env);
        Repetition& rep = out.reps[i];
        rep.summary.seed = cfg.seed_of(static_cast<int>(i));
        rep.result = train(*env, f, cfg.hyper, rep.summary.seed);
        const EpisodeRecord& fin = rep.result.final_rollout;
        rep.summary.terminal_robustness = fin.terminal_robustness;
        rep.summary.verdict = sat_verdict(fin.terminal_robustness, cfg.hyper.robustness, sk.body);
        rep.summary.greedy_success = episode_success(*env, sk, fin, cfg.hyper.robustness);
        const auto& succ = rep.result.metrics.success;
        for (std::size_t e = 0; e < succ.size(); ++e) {
          if (succ[e]) {
            rep.summary.first_success_episode = static_cast<int>(e) + 1;
            break;
          }
        }
        rep.summary.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  std::size_t threads = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, out.reps.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  RunSummary& s = out.summary;
  s.name = cfg.name;
  double sat = 0.0, rho = 0.0;
  for (const auto& r : out.reps) {
    s.reps.push_back(r.summary);
    sat += r.summary.verdict == Verdict::Satisfied ? 1.0 : 0.0;
    rho += r.summary.terminal_robustness;
  }
  s.satisfaction_rate = sat / static_cast<double>(out.reps.size());
  s.mean_terminal_robustness = rho / static_cast<double>(out.reps.size());

  if (write) {
    fs::create_directories(cfg.output_dir);
    std::vector<const TrainMetrics*> all;
    for (std::size_t i = 0; i < out.reps.size(); ++i) {
      const std::string stem = "rep_" + std::to_string(i);
      write_file(cfg.output_dir / (stem + ".csv"), metrics_csv(out.reps[i].result.metrics));
      write_file(cfg.output_dir / (stem + "_policy.json"), policy_artifact_json(out.reps[i], sk));
      all.push_back(&out.reps[i].result.metrics);
    }
    write_file(cfg.output_dir / "aggregate.csv", aggregate_csv(all));
  }
  s.seconds = std::chrono::duration<double>(clock::now() - started).count();
  if (write) write_file(cfg.output_dir / "summary.json", s.to_json());
  return out;
}

// -------------------------------------------------------------- commands

ExperimentConfig apply_overrides(ExperimentConfig cfg, const TrainOverrides& o) {
  if (o.seed) {
    cfg.base_seed = *o.seed;
    cfg.seeds.clear();
  }
  if (o.reps) {
    if (*o.reps < 1) config_error("--reps must be at least 1");
    cfg.repetitions = *o.reps;
    if (!cfg.seeds.empty() && cfg.seeds.size() < static_cast<std::size_t>(cfg.repetitions)) {
      config_error("seeds lists fewer entries than repetitions");
    }
  }
  if (o.out) {
    cfg.output_dir = *o.out;
  } else if (const char* env = std::getenv("HYPERLEARN_OUT_DIR"); env && *env) {
    cfg.output_dir = env;
  }
  return cfg;
}

namespace {

// Runs a command body, mapping library errors onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const SyntaxError& e) {
    err << "syntax error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kExitViolation;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Config:
      case ErrorKind::ArtifactMissing:
      case ErrorKind::BoundTooLarge:
      case ErrorKind::EmptyInput: return kExitUsage;
      default: return kExitViolation;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw Error(ErrorKind::Config, what + " " + p.string() + " does not exist");
}

void print_skolemized(const Formula& f, std::ostream& out) {
  const SkolemizedFormula sk = skolemize(f);
  out << pretty(sk) << "\n";
  if (sk.decls.empty()) {
    out << "note: no existential quantifier, body unchanged\n";
  }
  for (const auto& d : sk.decls) {
    out << skolem_name(d.exist_index) << " depends on {";
    for (std::size_t i = 0; i < d.deps.size(); ++i) {
      out << (i ? ", " : "") << sk.prefix[static_cast<std::size_t>(d.deps[i]) - 1].var.name;
    }
    out << "}\n";
  }
}

}  // namespace

int cmd_check(const fs::path& formula_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(formula_path, "formula file");
    const Formula f = parse_formula_unchecked(read_text_file(formula_path));
    const auto diags = validate(f);
    for (const auto& d : diags) err << to_string(d.kind) << ": " << d.message << "\n";
    if (!diags.empty()) return kExitViolation;
    out << "ok: " << unparse(f) << "\n";
    print_skolemized(f, out);
    return kExitOk;
  });
}

int cmd_skolemize(const fs::path& formula_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(formula_path, "formula file");
    print_skolemized(parse_formula(read_text_file(formula_path)), out);
    return kExitOk;
  });
}

int cmd_train(const fs::path& config_path, const TrainOverrides& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = apply_overrides(load_config(config_path), o);
    const RunOutput run = run_experiment(cfg, true);
    for (std::size_t i = 0; i < run.summary.reps.size(); ++i) {
      const auto& r = run.summary.reps[i];
      out << "rep " << i << " seed " << r.seed << ": " << to_string(r.verdict) << " rho "
          << format_number(r.terminal_robustness) << " success " << (r.greedy_success ? "yes" : "no")
          << " first_success_episode " << r.first_success_episode << "\n";
    }
    out << "satisfaction_rate " << format_number(run.summary.satisfaction_rate) << "\n";
    out << "output " << cfg.output_dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_eval(const fs::path& policy_path, const fs::path& config_path, std::optional<std::uint64_t> seed,
             std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_config(config_path);
    const PolicyArtifact art = load_policy_artifact(policy_path);
    const SkolemizedFormula sk = skolemize(load_formula_file(cfg.formula_path));
    auto env = make_environment(cfg.env);
    const EpisodeRecord ep = greedy_rollout(art.policies, *env, sk, cfg.hyper.robustness, seed.value_or(art.seed));
    for (std::size_t t = 0; t < ep.robustness.size(); ++t) {
      out << "t " << t << " rho " << format_number(ep.robustness[t]) << "\n";
    }
    const Verdict v = sat_verdict(ep.terminal_robustness, cfg.hyper.robustness, sk.body);
    if (!sk.decls.empty()) {
      try {
        out << "witnesses consistent: "
            << (check_consistency(sk, assignment_of(ep), art.witnesses) ? "yes" : "no") << "\n";
      } catch (const Error& e) {
        out << "witnesses consistent: no (" << e.what() << ")\n";
      }
    }
    out << "verdict " << to_string(v) << "\n";
    return v == Verdict::Satisfied ? kExitOk : kExitViolation;
  });
}

int cmd_oracle_pcp(const fs::path& dominoes_path, int max_len, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(dominoes_path, "domino file");
    const DominoSet d = load_dominoes_file(dominoes_path);
    const auto sol = pcp_oracle(d, max_len);
    if (!sol) {
      out << "none within bound " << max_len << "\n";
      return kExitViolation;
    }
    out << "solution:";
    for (int i : *sol) out << " " << i;
    out << "\nword: " << concat_words(d, *sol).first << "\n";
    return kExitOk;
  });
}

int cmd_oracle_boolean(const fs::path& traces_path, const fs::path& formula_path, std::ostream& out,
                       std::ostream& err) {
  return guarded(err, [&] {
    require_file(traces_path, "trace file");
    require_file(formula_path, "formula file");
    const auto traces = parse_trace_set(read_text_file(traces_path));
    const bool sat = boolean_sat(traces, load_formula_file(formula_path));
    out << (sat ? "true" : "false") << "\n";
    return sat ? kExitOk : kExitViolation;
  });
}

}  // namespace hyperlearn
