// Acceptance run: one PASS/FAIL line per criterion. Criteria listed with
// --known-red still print their real verdict but do not affect the exit code.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "hyperlearn/harness.hpp"
#include "oracles.hpp"
#include "skolem_optimality.hpp"

namespace hl = hyperlearn;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path data(const std::string& rel) { return fs::path(HYPERLEARN_DATA_DIR) / rel; }
fs::path config(const std::string& name) { return fs::path(HYPERLEARN_CONFIG_DIR) / (name + ".ini"); }

hl::RunOutput run_config(const std::string& name) {
  return hl::run_experiment(hl::load_config(config(name)), false);
}

// 1. Boolean satisfaction agrees with quantified robustness reaching rho_max.
Outcome boolean_fuzz() {
  const auto t0 = Clock::now();
  oracle::Rng r(1001);
  const hl::RobustnessConfig cfg;
  int cases = 0, mismatches = 0, satisfied = 0;
  for (; cases < 1200; ++cases) {
    oracle::FormulaShape shape;
    shape.max_depth = 1 + r.below(4);
    auto f = hl::parse_formula(oracle::random_formula_text(r, shape));
    const std::size_t count = 1 + static_cast<std::size_t>(r.below(3));
    auto ts = oracle::random_trace_set(r, count, 1 + static_cast<std::size_t>(r.below(5)), false);
    const bool robust = oracle::quantified_robustness(ts, f, cfg) == cfg.rho_max;
    const bool sat = hl::boolean_sat(ts, f);
    satisfied += sat;
    if (robust != sat) ++mismatches;
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 60.0, fmt::format("{} cases ({} satisfied), {} mismatches, {:.2f}s", cases, satisfied, mismatches, s)};
}

// 2. Algebraic laws of the robustness semantics, checked exactly.
Outcome algebra() {
  const auto t0 = Clock::now();
  oracle::Rng r(2002);
  const double hi = 100.0;
  int anti = 0, conj = 0, disj = 0, mono = 0, bounds = 0, bad = 0;
  for (int i = 0; i < 600; ++i) {
    oracle::FormulaShape shape;
    shape.numeric = true;
    shape.max_depth = 1 + r.below(3);
    auto a = hl::parse_formula(oracle::random_formula_text(r, shape));
    auto ts = oracle::random_trace_set(r, a.arity(), 5, true);
    auto z = hl::zip_traces(ts);
    // A second formula over the same trace variables.
    hl::LtlNode b = hl::LtlNode::unary(hl::Op::Eventually, a.body);
    if (r.coin()) b = hl::LtlNode::unary(hl::Op::Not, hl::LtlNode::unary(hl::Op::Next, a.body));
    const double va = hl::eval_ltl(z, a.body), vb = hl::eval_ltl(z, b);

    bad += hl::eval_ltl(z, hl::LtlNode::unary(hl::Op::Not, a.body)) != -va;
    ++anti;
    bad += hl::eval_ltl(z, hl::LtlNode::binary(hl::Op::And, a.body, b)) != std::min(va, vb);
    ++conj;
    bad += hl::eval_ltl(z, hl::LtlNode::binary(hl::Op::Or, a.body, b)) != std::max(va, vb);
    ++disj;
    // Window monotonicity is a property of F and G over state formulas.
    oracle::FormulaShape state = shape;
    state.temporal = false;
    state.quantifiers = 2;
    auto psi = hl::parse_formula(oracle::random_formula_text(r, state));
    auto zs = hl::zip_traces(oracle::random_trace_set(r, psi.arity(), 5, true));
    const auto fn = hl::LtlNode::unary(hl::Op::Eventually, psi.body);
    const auto gn = hl::LtlNode::unary(hl::Op::Always, psi.body);
    for (std::size_t k = 1; k < zs.size(); ++k) {
      bad += hl::eval_ltl(zs, 0, k, fn) > hl::eval_ltl(zs, 0, k + 1, fn);
      bad += hl::eval_ltl(zs, 0, k, gn) < hl::eval_ltl(zs, 0, k + 1, gn);
    }
    ++mono;
    for (std::size_t k = 0; k <= z.size(); ++k) {
      const double v = hl::eval_ltl(z, 0, k, a.body);
      bad += v < -hi || v > hi;
    }
    ++bounds;
  }
  const double s = seconds_since(t0);
  const int least = std::min({anti, conj, disj, mono, bounds});
  return {bad == 0 && least >= 500 && s < 30.0,
          fmt::format("{} cases per law, {} violations, {:.2f}s", least, bad, s)};
}

// 3. Dependency sets of every length-4 prefix and the rescue Skolem form.
Outcome skolem_structure() {
  int wrong = 0;
  for (int mask = 0; mask < 16; ++mask) {
    std::string text, body;
    std::map<int, std::vector<int>> expected;
    std::vector<int> universals;
    for (int i = 1; i <= 4; ++i) {
      const bool exists = (mask >> (4 - i)) & 1;
      const std::string v = "t" + std::to_string(i);
      text += (exists ? "exists " : "forall ") + v + ". ";
      body += (i > 1 ? " & p@" : "p@") + v;
      if (exists) expected[i] = universals;
      else universals.push_back(i);
    }
    wrong += hl::dependency_sets(hl::parse_formula(text + body)) != expected;
  }

  auto f = hl::load_formula_file(data("formulas/rescue.hltl"));
  auto sk = hl::skolemize(f);
  int orig_t1 = 0, orig_t2 = 0, sk_trace = 0, sk_skolem = 0;
  auto count = [](const hl::LtlNode& n, auto&& fn) {
    hl::for_each_atom(n, [&](const hl::Atom& a) {
      if (const auto* bp = std::get_if<hl::BoolProp>(&a)) fn(bp->trace);
      else for (const auto& r : std::get<hl::Predicate>(a).args) fn(r);
    });
  };
  count(f.body, [&](const hl::TraceRef& r) { (r.index == 1 ? orig_t1 : orig_t2)++; });
  count(sk.body, [&](const hl::TraceRef& r) {
    if (r.kind == hl::TargetKind::Skolem && r.index == 2) ++sk_skolem;
    else if (r.kind == hl::TargetKind::Trace && r.index == 1) ++sk_trace;
  });
  const bool rescue_ok = sk.decls.size() == 1 && sk.decls[0] == hl::SkolemDecl{2, {1}} &&
                         sk.universal_vars.size() == 1 && sk_skolem == orig_t2 && sk_trace == orig_t1 &&
                         orig_t2 > 0;
  return {wrong == 0 && rescue_ok,
          fmt::format("16 prefixes, {} wrong; rescue f2(t1) with {} Skolem and {} trace atoms", wrong, sk_skolem,
                      sk_trace)};
}

// Labels of a wildfire path given by cell letters, padded with the last cell.
std::vector<hl::Trace> wildfire_paths(const std::string& p1, const std::string& p2) {
  hl::WildfireWorld w(8);
  const std::size_t len = std::max(p1.size(), p2.size());
  std::vector<hl::JointState> path{w.reset(0)};
  auto move = [](char from, char to) {
    const auto a = hl::WildfireWorld::cell_of(from), b = hl::WildfireWorld::cell_of(to);
    if (b.y > a.y) return 1;
    if (b.y < a.y) return 2;
    if (b.x < a.x) return 3;
    if (b.x > a.x) return 4;
    return 0;
  };
  auto at = [](const std::string& p, std::size_t t) { return p[std::min(t, p.size() - 1)]; };
  for (std::size_t t = 1; t < len; ++t) {
    path.push_back(w.step(path.back(), hl::JointAction{{move(at(p1, t - 1), at(p1, t)), move(at(p2, t - 1), at(p2, t))}}));
  }
  return w.traces_of(path);
}

// 4. Tabular training on the wildfire rescue task.
Outcome wildfire() {
  const auto t0 = Clock::now();
  auto f = hl::load_formula_file(data("formulas/rescue.hltl"));
  auto sk = hl::skolemize(f);
  const bool optimal_ok =
      hl::sat_verdict(hl::eval_hyper(wildfire_paths("adefcfi", "adghefi"), sk), {}, sk.body) == hl::Verdict::Satisfied;
  auto run = run_config("wildfire");
  int sat = 0;
  for (const auto& r : run.summary.reps) sat += r.verdict == hl::Verdict::Satisfied;
  const double s = seconds_since(t0);
  return {sat >= 8 && optimal_ok && s < 300.0,
          fmt::format("{}/{} seeds Satisfied, optimal paths {}, {:.1f}s", sat, run.summary.reps.size(),
                      optimal_ok ? "Satisfied" : "not Satisfied", s)};
}

double tail_successes(const hl::RunOutput& run) {
  double sum = 0.0;
  for (const auto& rep : run.reps) {
    const auto& ok = rep.result.metrics.success;
    const std::size_t from = ok.size() - ok.size() / 10;
    sum += static_cast<double>(std::count(ok.begin() + static_cast<std::ptrdiff_t>(from), ok.end(), true));
  }
  return sum;
}

// 5. Two agents crossing a 4x4 grid without colliding.
Outcome safe_rl() {
  auto robust = run_config("safe-rl-4x4");
  auto base = run_config("safe-rl-4x4-baseline");
  hl::GridWorld g(hl::load_map_file(data("maps/cross4x4.map")), 2, 16);
  int ok = 0;
  for (const auto& rep : robust.reps) {
    // Recount goals and collisions from the raw states.
    const auto& states = rep.result.final_rollout.states;
    bool collided = false;
    std::vector<bool> reached(2, false);
    for (const auto& s : states) {
      for (std::size_t k = 0; k < 2; ++k) reached[k] = reached[k] || g.on_goal(s, k);
      collided = collided || (s.step_count > 0 && hl::GridWorld::position(s.per_trace[0]) == hl::GridWorld::position(s.per_trace[1]));
    }
    ok += reached[0] && reached[1] && !collided;
  }
  const double tr = tail_successes(robust), tb = tail_successes(base);
  return {ok >= 8 && tb <= tr,
          fmt::format("{}/{} seeds reach both goals without collision; final-10% successes {} robustness vs {} "
                      "baseline",
                      ok, robust.reps.size(), tr, tb)};
}

bool is_real_match(const hl::DominoSet& d, const hl::EpisodeRecord& ep) {
  for (const auto& s : ep.states) {
    for (const auto& a : s.per_trace) {
      const auto idx = hl::PcpWorld::chosen(a);
      if (idx.empty()) continue;
      const auto [top, bottom] = oracle::words_of(d.dominoes, idx);
      if (top == bottom) return true;
    }
  }
  return false;
}

// 6. PCP: matches on the solvable set, none on the unsolvable one.
Outcome pcp() {
  const auto solvable_cfg = hl::load_config(config("pcp-k3"));
  auto solvable = hl::run_experiment(solvable_cfg, false);
  const auto d = hl::load_dominoes_file(solvable_cfg.env.dominoes_path);
  int found = 0;
  for (const auto& rep : solvable.reps) {
    found += rep.result.first_success && is_real_match(d, *rep.result.first_success);
  }
  auto unsolvable = run_config("pcp-k3-unsolvable");
  int false_matches = 0;
  for (const auto& rep : unsolvable.reps) {
    false_matches += static_cast<int>(std::count(rep.result.metrics.success.begin(), rep.result.metrics.success.end(), true));
  }
  return {found >= 8 && false_matches == 0 && solvable_cfg.hyper.xi <= 1000,
          fmt::format("{}/{} seeds found a validated match within {} episodes; {} matches claimed on the unsolvable "
                      "set",
                      found, solvable.reps.size(), solvable_cfg.hyper.xi, false_matches)};
}

// 7. Fair sharing of a single resource.
Outcome fairness() {
  const auto cfg = hl::load_config(config("fairness-4x4"));
  auto run = hl::run_experiment(cfg, false);
  const double floor = 0.6 * (cfg.env.beta / 2.0);
  int ok = 0;
  std::string energies;
  for (const auto& rep : run.reps) {
    const auto& last = rep.result.final_rollout.states.back();
    const double e1 = static_cast<double>(hl::ResourceWorld::energy(last.per_trace[0]));
    const double e2 = static_cast<double>(hl::ResourceWorld::energy(last.per_trace[1]));
    ok += std::abs(e1 - e2) < cfg.env.delta && e1 >= floor && e2 >= floor;
    energies += fmt::format(" ({},{})", e1, e2);
  }
  return {ok >= 8, fmt::format("{}/{} seeds fair; energies{}", ok, run.reps.size(), energies)};
}

// 8. Skolem-optimal policy tuples coincide with the original optimum.
Outcome skolem_optimality() {
  const auto t0 = Clock::now();
  auto res = oracle::skolem_optimality_brute_force(
      hl::parse_formula("forall t1. exists t2. (F p@t1 -> F q@t2) & G !(q@t1 & q@t2)"));
  const double s = seconds_since(t0);
  return {res.argmax_skolem == res.argmax_original && s < 60.0,
          fmt::format("{} tuples, {} Skolem-optimal, {} optimal, {:.2f}s", res.tuples, res.argmax_skolem.size(),
                      res.argmax_original.size(), s)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. Training twice from the same config writes identical CSVs.
Outcome reproducible(const fs::path& work) {
  std::ostringstream out, err;
  std::vector<fs::path> dirs = {work / "repro_a", work / "repro_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    hl::TrainOverrides o;
    o.out = d;
    if (hl::cmd_train(config("safe-rl-4x4"), o, out, err) != hl::kExitOk) return {false, "train failed: " + err.str()};
  }
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    differ += slurp(e.path()) != slurp(dirs[1] / e.path().filename());
  }
  return {files > 0 && differ == 0, fmt::format("{} CSV files compared, {} differ", files, differ)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> known_red;
  std::vector<int> only;
  fs::path work = fs::temp_directory_path() / "hyperlearn_acceptance";
  app.add_option("--known-red", known_red, "criteria whose failure does not affect the exit code");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--work-dir", work, "scratch directory for training output");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"boolean/robustness agreement", boolean_fuzz},
      {"robustness algebra", algebra},
      {"dependency sets and Skolem form", skolem_structure},
      {"wildfire rescue", wildfire},
      {"safe multi-agent navigation", safe_rl},
      {"post correspondence", pcp},
      {"resource fairness", fairness},
      {"Skolem optimality brute force", skolem_optimality},
      {"reproducible training CSVs", [&] { return reproducible(work); }},
  };

  int blocking = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool red_ok = std::find(known_red.begin(), known_red.end(), id) != known_red.end();
    std::cout << fmt::format("{} criterion {} ({}): {}{}\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                             o.detail, !o.pass && red_ok ? " [known red]" : "")
              << std::flush;
    if (!o.pass && !red_ok) ++blocking;
  }
  return blocking == 0 ? 0 : 1;
}
