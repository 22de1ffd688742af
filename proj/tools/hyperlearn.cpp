#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperlearn/harness.hpp"

namespace hl = hyperlearn;

int main(int argc, char** argv) {
  CLI::App app{"Robustness-guided reinforcement learning for HyperLTL objectives"};
  app.require_subcommand(1);

  std::string formula, config, policy, out, dominoes, traces;
  std::uint64_t seed = 0;
  int reps = 0, max_len = 8;

  auto* check = app.add_subcommand("check", "Validate a formula and print its Skolemized form");
  check->add_option("formula", formula, "Formula file")->required();

  auto* skolem = app.add_subcommand("skolemize", "Print the Skolemized form and dependency sets");
  skolem->add_option("formula", formula, "Formula file")->required();

  auto* train = app.add_subcommand("train", "Run the repetitions of an experiment config");
  train->add_option("--config", config, "Experiment config (INI)")->required();
  auto* train_seed = train->add_option("--seed", seed, "Base seed, replacing the config's seeds");
  auto* train_reps = train->add_option("--reps", reps, "Number of repetitions");
  auto* train_out = train->add_option("--out", out, "Output directory (overrides HYPERLEARN_OUT_DIR)");

  auto* eval = app.add_subcommand("eval", "Roll out a trained policy and report its verdict");
  eval->add_option("policy", policy, "Policy artifact (rep_<i>_policy.json)")->required();
  eval->add_option("--config", config, "Experiment config the policy was trained with")->required();
  auto* eval_seed = eval->add_option("--seed", seed, "Rollout seed (default: the training seed)");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive reference searches");
  oracle->require_subcommand(1);
  auto* pcp = oracle->add_subcommand("pcp", "Shortest PCP solution within a length bound");
  pcp->add_option("dominoes", dominoes, "Domino file")->required();
  pcp->add_option("--max-len", max_len, "Longest sequence searched (at most 12)");
  auto* bsat = oracle->add_subcommand("boolean-sat", "Finite-trace satisfaction of a formula by a trace set");
  bsat->add_option("traces", traces, "Trace set file")->required();
  bsat->add_option("formula", formula, "Formula file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hl::kExitUsage;
  }

  if (*check) return hl::cmd_check(formula, std::cout, std::cerr);
  if (*skolem) return hl::cmd_skolemize(formula, std::cout, std::cerr);
  if (*train) {
    hl::TrainOverrides o;
    if (*train_seed) o.seed = seed;
    if (*train_reps) o.reps = reps;
    if (*train_out) o.out = out;
    return hl::cmd_train(config, o, std::cout, std::cerr);
  }
  if (*eval) {
    std::optional<std::uint64_t> s;
    if (*eval_seed) s = seed;
    return hl::cmd_eval(policy, config, s, std::cout, std::cerr);
  }
  if (*pcp) return hl::cmd_oracle_pcp(dominoes, max_len, std::cout, std::cerr);
  if (*bsat) return hl::cmd_oracle_boolean(traces, formula, std::cout, std::cerr);
  return hl::kExitUsage;
}
