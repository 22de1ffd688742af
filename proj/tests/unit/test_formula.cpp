#include <gtest/gtest.h>

#include "hyperlearn/formula.hpp"
#include "oracles.hpp"

namespace hl = hyperlearn;

TEST(Formula, ParsesQuantifiersAndResolvesIndices) {
  auto f = hl::parse_formula("forall t1. exists t2. G p@t1 -> F q@t2");
  ASSERT_EQ(f.prefix.size(), 2u);
  EXPECT_EQ(f.prefix[0].kind, hl::QuantKind::Forall);
  EXPECT_EQ(f.prefix[1].kind, hl::QuantKind::Exists);
  EXPECT_EQ(f.body.op, hl::Op::Implies);
  const auto& rhs = f.body.children[1].children[0];
  EXPECT_EQ(std::get<hl::BoolProp>(rhs.atom).trace.index, 2);
}

TEST(Formula, PrecedenceAndAssociativity) {
  auto f = hl::parse_formula("forall a. p@a & q@a | p@a U q@a U p@a");
  // | binds looser than &, U is right-associative and binds tighter than |
  EXPECT_EQ(f.body.op, hl::Op::Or);
  EXPECT_EQ(f.body.children[0].op, hl::Op::And);
  EXPECT_EQ(f.body.children[1].op, hl::Op::Until);
  EXPECT_EQ(f.body.children[1].children[1].op, hl::Op::Until);
}

TEST(Formula, PredicateForms) {
  auto f = hl::parse_formula("forall t1. forall t2. [ |loc@t1 - loc@t2| < 3 ] & [ x@t1 > -1.5 ] & [ g@t1 - g@t2 = 0 ]");
  std::vector<hl::Predicate> ps;
  hl::for_each_atom(f.body, [&](const hl::Atom& a) { ps.push_back(std::get<hl::Predicate>(a)); });
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_TRUE(ps[0].abs_diff);
  EXPECT_EQ(ps[0].constant, 3.0);
  EXPECT_EQ(ps[1].comparator, hl::Comparator::GT);
  EXPECT_EQ(ps[1].constant, -1.5);
  EXPECT_EQ(ps[2].comparator, hl::Comparator::EQ);
  EXPECT_EQ(ps[2].args.size(), 2u);
  EXPECT_FALSE(hl::is_boolean_only(f.body));
}

TEST(Formula, SyntaxErrorsCarryPosition) {
  try {
    hl::parse_formula("forall t1.\n  p@t1 & ");
    FAIL() << "expected a syntax error";
  } catch (const hl::SyntaxError& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::Syntax);
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(hl::parse_formula("forall t1. p@"), hl::SyntaxError);
  EXPECT_THROW(hl::parse_formula("forall t1. [ x@t1 - y@t1 < 2 ]"), hl::SyntaxError);
  EXPECT_THROW(hl::parse_formula("forall t1. p@t1 $"), hl::SyntaxError);
}

TEST(Formula, ValidationDiagnostics) {
  auto f = hl::parse_formula_unchecked("forall t1. exists t1. p@t1 & q@t3");
  auto d = hl::validate(f);
  bool dup = false, unbound = false;
  for (const auto& x : d) {
    dup = dup || x.kind == hl::ErrorKind::DuplicateQuantifier;
    unbound = unbound || x.kind == hl::ErrorKind::UnboundTraceVar;
  }
  EXPECT_TRUE(dup);
  EXPECT_TRUE(unbound);
  try {
    hl::parse_formula("forall t1. p@t2");
    FAIL();
  } catch (const hl::Error& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::UnboundTraceVar);
  }
}

TEST(Formula, BundledFormulasAreClosed) {
  for (const char* name : {"rescue", "saferl", "fairness", "pcp"}) {
    auto f = hl::load_formula_file(std::string(HYPERLEARN_DATA_DIR) + "/formulas/" + name + ".hltl");
    EXPECT_TRUE(hl::validate(f).empty()) << name;
  }
  auto bad = hl::parse_formula_unchecked(hl::read_text_file(std::string(HYPERLEARN_DATA_DIR) + "/formulas/unbound.hltl"));
  EXPECT_FALSE(hl::validate(bad).empty());
}

TEST(Formula, UnparseRoundTripFuzz) {
  oracle::Rng r(11);
  for (int i = 0; i < 2000; ++i) {
    oracle::FormulaShape shape;
    shape.max_depth = 1 + r.below(6);
    shape.numeric = r.coin();
    const auto text = oracle::random_formula_text(r, shape);
    const auto f = hl::parse_formula(text);
    const auto again = hl::parse_formula(hl::unparse(f));
    ASSERT_EQ(f, again) << text << "\n" << hl::unparse(f);
    ASSERT_EQ(hl::unparse(again), hl::unparse(f));
  }
}

TEST(Formula, GarbageNeverCrashes) {
  oracle::Rng r(5);
  const std::string alphabet = "forallexists t1.@pq[]|<>=-&!()XFGU 0123456789\n";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int n = r.below(40);
    for (int k = 0; k < n; ++k) s += alphabet[static_cast<std::size_t>(r.below(static_cast<int>(alphabet.size())))];
    try {
      auto f = hl::parse_formula_unchecked(s);
      (void)hl::validate(f);
    } catch (const hl::SyntaxError&) {
    }
  }
}

TEST(Formula, DeepNestingIsRejectedNotOverflowed) {
  std::string s = "forall t. ";
  for (int i = 0; i < 5000; ++i) s += "!";
  s += "p@t";
  EXPECT_THROW(hl::parse_formula(s), hl::SyntaxError);
}

TEST(Formula, CountsAndDepth) {
  auto f = hl::parse_formula("forall t. (p@t & q@t) U X p@t");
  EXPECT_EQ(hl::count_atoms(f.body), 3u);
  EXPECT_EQ(hl::depth(f.body), 3u);
}
