#include <gtest/gtest.h>

#include "hyperlearn/worlds.hpp"
#include "oracles.hpp"

namespace hl = hyperlearn;

namespace {

std::string data_file(const std::string& rel) { return std::string(HYPERLEARN_DATA_DIR) + "/" + rel; }

hl::JointAction act(std::initializer_list<int> a) { return hl::JointAction{std::vector<int>(a)}; }

}  // namespace

TEST(Maps, OpenMapHasNoWalls) {
  auto m = hl::load_map("1..\n...\n..2\n");
  EXPECT_EQ(m.width, 3);
  EXPECT_EQ(m.height, 3);
  EXPECT_TRUE(m.walls.empty());
  EXPECT_EQ(m.starts.at(1), (hl::Cell{0, 2}));
  EXPECT_EQ(m.starts.at(2), (hl::Cell{2, 0}));
}

TEST(Maps, Errors) {
  auto kind_of = [](const std::string& text) {
    try {
      hl::load_map(text);
    } catch (const hl::Error& e) {
      return e.kind();
    }
    return hl::ErrorKind::Syntax;
  };
  EXPECT_EQ(kind_of("1..\n..\n"), hl::ErrorKind::NonRectangular);
  EXPECT_EQ(kind_of("1.?\n...\n"), hl::ErrorKind::UnknownGlyph);
  EXPECT_EQ(kind_of("...\n...\n"), hl::ErrorKind::MissingStart);
}

TEST(Maps, BenchmarkTopology) {
  for (const char* name : {"mit", "suny"}) {
    auto m = hl::load_map_file(data_file(std::string("maps/") + name + ".map"));
    EXPECT_EQ(m.starts.at(1), m.goals.at(2)) << name;
    EXPECT_EQ(m.starts.at(2), m.goals.at(1)) << name;
  }
  for (const char* name : {"isr", "mit", "pentagon", "suny", "cross4x4"}) {
    auto m = hl::load_map_file(data_file(std::string("maps/") + name + ".map"));
    for (int k : {1, 2}) {
      EXPECT_TRUE(m.open(m.starts.at(k))) << name;
      EXPECT_TRUE(m.open(m.goals.at(k))) << name;
    }
  }
  auto isr = hl::load_map_file(data_file("maps/isr.map"));
  EXPECT_EQ(isr.width, 9);
  EXPECT_EQ(isr.height, 10);
}

TEST(Grid, BlockedMovesStayPut) {
  auto m = hl::load_map("1#\n..\n");
  EXPECT_EQ(hl::apply_move(m, {0, 1}, static_cast<int>(hl::Move::Right)), (hl::Cell{0, 1}));
  EXPECT_EQ(hl::apply_move(m, {0, 1}, static_cast<int>(hl::Move::Up)), (hl::Cell{0, 1}));
  EXPECT_EQ(hl::apply_move(m, {0, 1}, static_cast<int>(hl::Move::Down)), (hl::Cell{0, 0}));
}

TEST(Grid, StepLabelsAndErrors) {
  hl::GridWorld g(hl::load_map_file(data_file("maps/cross4x4.map")), 2, 3);
  auto s = g.reset(0);
  EXPECT_THROW(g.step(s, act({0})), hl::Error);
  EXPECT_THROW(g.step(s, act({0, 7})), hl::Error);
  s = g.step(s, act({1, 1}));
  EXPECT_EQ(s.step_count, 1);
  auto labels = g.label_of(s);
  EXPECT_EQ(labels[0].value("x"), 0.0);
  EXPECT_EQ(labels[0].value("y"), 1.0);
  s = g.step(s, act({0, 0}));
  s = g.step(s, act({0, 0}));
  try {
    g.step(s, act({0, 0}));
    FAIL();
  } catch (const hl::Error& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::EpisodeExhausted);
  }
}

TEST(Grid, CollisionAndGoalLabels) {
  auto m = hl::load_map("a1.2b\na = goal:1\nb = goal:2\n");
  hl::GridWorld g(m, 2, 5);
  auto s = g.step(g.reset(0), act({4, 3}));
  EXPECT_TRUE(g.collision(s));
  EXPECT_TRUE(g.label_of(s)[0].has("col"));
  s = g.step(g.reset(0), act({3, 4}));
  EXPECT_TRUE(g.on_goal(s, 0));
  EXPECT_TRUE(g.label_of(s)[1].has("g2"));
  EXPECT_TRUE(g.label_of(s)[1].has("goal"));
}

TEST(Grid, StepIsPureAndDeterministic) {
  hl::GridWorld g(hl::load_map_file(data_file("maps/cross4x4.map")), 2, 16);
  const auto s0 = g.reset(3);
  const auto copy = s0;
  auto a = g.step(s0, act({4, 2}));
  auto b = g.step(s0, act({4, 2}));
  EXPECT_EQ(s0, copy);
  EXPECT_EQ(a, b);
}

TEST(Wildfire, FiresGoOutWhenDroneOneVisits) {
  hl::WildfireWorld w(8);
  auto s = w.reset(0);
  EXPECT_EQ(s.shared[0], 7);
  s = w.step(s, act({4, 4}));  // both to b
  s = w.step(s, act({4, 0}));  // drone 1 to c
  EXPECT_TRUE(w.label_of(s)[0].has("extinguished"));
  EXPECT_EQ(w.label_of(s)[0].value("loc"), 2.0);
  auto s2 = w.step(w.step(w.reset(0), act({4, 4})), act({0, 4}));  // drone 2 to c
  EXPECT_TRUE(w.label_of(s2)[1].has("fire"));
}

TEST(Resource, EnergyCountsArrivals) {
  hl::ResourceWorld r(hl::load_map("1r\nr = resource\n"), 1, 10, 10);
  auto s = r.reset(0);
  s = r.step(s, act({4}));
  EXPECT_EQ(hl::ResourceWorld::energy(s.per_trace[0]), 1);
  EXPECT_TRUE(r.label_of(s)[0].has("res"));
  s = r.step(s, act({0}));
  EXPECT_EQ(hl::ResourceWorld::energy(s.per_trace[0]), 1);
  EXPECT_FALSE(r.label_of(s)[0].has("res"));
  EXPECT_TRUE(r.label_of(s)[0].has("on_res"));
  s = r.step(r.step(s, act({3})), act({4}));
  EXPECT_EQ(hl::ResourceWorld::energy(s.per_trace[0]), 2);
  EXPECT_THROW(hl::ResourceWorld(hl::load_map("1.\n"), 1, 10, 10), hl::Error);
}

TEST(Pcp, ParsingAndOracle) {
  auto d = hl::parse_dominoes("; comment\na|a\n");
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(hl::pcp_oracle(d, 4), (std::vector<int>{1}));
  EXPECT_FALSE(hl::pcp_oracle(hl::parse_dominoes("ab|a\n"), 10).has_value());
  EXPECT_THROW(hl::parse_dominoes("a|\n"), hl::Error);
  EXPECT_THROW(hl::parse_dominoes("aA|a\n"), hl::Error);
  EXPECT_THROW(hl::pcp_oracle(d, 13), hl::Error);
}

TEST(Pcp, BundledSetsAreCertified) {
  for (const char* f : {"k3_solvable", "k5", "k6"}) {
    auto d = hl::load_dominoes_file(data_file(std::string("dominoes/") + f + ".dom"));
    auto sol = hl::pcp_oracle(d, 8);
    ASSERT_TRUE(sol.has_value()) << f;
    auto [top, bot] = oracle::words_of(d.dominoes, *sol);
    EXPECT_EQ(top, bot) << f;
  }
  auto k3 = hl::pcp_oracle(hl::load_dominoes_file(data_file("dominoes/k3_solvable.dom")), 8);
  EXPECT_LE(k3->size(), 5u);
  EXPECT_FALSE(hl::pcp_oracle(hl::load_dominoes_file(data_file("dominoes/k3_unsolvable.dom")), 12).has_value());
}

TEST(Pcp, OracleAgreesWithBruteForce) {
  oracle::Rng r(31);
  for (int i = 0; i < 150; ++i) {
    std::vector<std::pair<std::string, std::string>> doms;
    const int k = 2 + r.below(2);
    auto word = [&] {
      std::string w;
      for (int n = 1 + r.below(3); n > 0; --n) w += static_cast<char>('a' + r.below(2));
      return w;
    };
    for (int j = 0; j < k; ++j) doms.emplace_back(word(), word());
    hl::DominoSet d{doms};
    auto sol = hl::pcp_oracle(d, 5);
    // Exhaustive search over every index sequence of length 1..5.
    std::size_t best = 0;
    for (std::size_t len = 1; len <= 5 && !best; ++len) {
      std::vector<int> seq(len, 1);
      while (true) {
        auto [t, b] = oracle::words_of(doms, seq);
        if (t == b) {
          best = len;
          break;
        }
        std::size_t p = 0;
        while (p < len && seq[p] == k) seq[p++] = 1;
        if (p == len) break;
        ++seq[p];
      }
    }
    ASSERT_EQ(sol.has_value(), best != 0);
    if (sol) {
      EXPECT_EQ(sol->size(), best);
      auto [t, b] = oracle::words_of(doms, *sol);
      EXPECT_EQ(t, b);
    }
  }
}

TEST(Pcp, WordsEqualIndependentConcatenation) {
  auto d = hl::load_dominoes_file(data_file("dominoes/k5.dom"));
  hl::PcpWorld w(d, 6);
  oracle::Rng r(2);
  for (int ep = 0; ep < 200; ++ep) {
    auto s = w.reset(0);
    std::vector<std::vector<int>> picked(2);
    while (s.step_count < w.beta() && !w.terminal(s)) {
      hl::JointAction a{{r.below(w.num_actions()), r.below(w.num_actions())}};
      for (std::size_t k = 0; k < 2; ++k) {
        if (!hl::PcpWorld::finished(s.per_trace[k]) && a.per_trace[k] != w.terminator() && picked[k].size() < 6) {
          picked[k].push_back(a.per_trace[k] + 1);
        }
      }
      s = w.step(s, a);
      for (std::size_t k = 0; k < 2; ++k) {
        ASSERT_EQ(hl::PcpWorld::chosen(s.per_trace[k]), picked[k]);
        ASSERT_EQ(w.words(s.per_trace[k]), oracle::words_of(d.dominoes, picked[k]));
      }
    }
  }
}

TEST(Pcp, TracesAreLetterAligned) {
  hl::PcpWorld w(hl::parse_dominoes("a|ab\nba|a\n"), 4);
  auto s = w.reset(0);
  std::vector<hl::JointState> path{s};
  path.push_back(w.step(path.back(), act({0, 1})));
  path.push_back(w.step(path.back(), act({2, 2})));
  auto ts = w.traces_of(path);
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].size(), ts[1].size());
  // trace 1 picked a|ab then terminated: top "a#..", bottom "ab#.."
  EXPECT_TRUE(ts[0][0].has("top_a"));
  EXPECT_TRUE(ts[0][1].has("top_end"));
  EXPECT_TRUE(ts[0][1].has("bot_b"));
  EXPECT_EQ(ts[0][1].value("gap"), -2.0);
  EXPECT_TRUE(ts[0].back().has("top_end"));
  EXPECT_TRUE(ts[0].back().has("bot_end"));
  EXPECT_TRUE(w.terminal(path.back()));
}

TEST(Baselines, SafeRlAndPcpRewards) {
  auto m = hl::load_map("a1.2b\na = goal:1\nb = goal:2\n");
  hl::GridWorld g(m, 2, 5);
  auto s0 = g.reset(0);
  auto both = g.step(s0, act({3, 4}));
  EXPECT_EQ(hl::baseline_reward(hl::BaselineKind::SafeRL, g, s0, act({3, 4}), both), 10.0);
  auto one = g.step(s0, act({3, 0}));
  EXPECT_EQ(hl::baseline_reward(hl::BaselineKind::SafeRL, g, s0, act({3, 0}), one), 5.0);
  auto col = g.step(s0, act({4, 3}));
  EXPECT_EQ(hl::baseline_reward(hl::BaselineKind::SafeRL, g, s0, act({4, 3}), col), -5.0);
  EXPECT_THROW(hl::baseline_reward(hl::BaselineKind::Pcp, g, s0, act({0, 0}), s0), hl::Error);
  hl::PcpWorld p(hl::parse_dominoes("a|ab\nb|a\n"), 3);
  auto q0 = p.reset(0);
  auto q1 = p.step(q0, act({0, 1}));
  EXPECT_EQ(hl::baseline_reward(hl::BaselineKind::Pcp, p, q0, act({0, 1}), q1), 0.0);
  EXPECT_THROW(hl::baseline_reward(hl::BaselineKind::SafeRL, p, q0, act({0, 1}), q1), hl::Error);
}
