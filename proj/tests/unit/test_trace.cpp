#include <gtest/gtest.h>

#include "hyperlearn/trace.hpp"
#include "oracles.hpp"

namespace hl = hyperlearn;

TEST(Trace, ZipBundlesPointwise) {
  hl::Trace a(1), b(1);
  a[0].props = {"p"};
  b[0].props = {"q"};
  auto z = hl::zip_traces({a, b});
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z.arity, 2u);
  EXPECT_TRUE(z.columns[0][0].has("p"));
  EXPECT_TRUE(z.columns[0][1].has("q"));
}

TEST(Trace, ZipErrors) {
  try {
    hl::zip_traces({hl::Trace(3), hl::Trace(2)});
    FAIL();
  } catch (const hl::Error& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::LengthMismatch);
  }
  try {
    hl::zip_traces({});
    FAIL();
  } catch (const hl::Error& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::EmptyInput);
  }
}

TEST(Trace, ProjectionInvertsZip) {
  oracle::Rng r(3);
  for (int i = 0; i < 300; ++i) {
    auto ts = oracle::random_trace_set(r, 1 + r.below(4), 1 + r.below(6), true);
    auto z = hl::zip_traces(ts);
    for (std::size_t k = 0; k < ts.size(); ++k) ASSERT_EQ(hl::project(z, k), ts[k]);
  }
}

TEST(Trace, OrderedUnionSortsByQuantifierPosition) {
  hl::Trace te(1), tu(1);
  te[0].props = {"e"};
  tu[0].props = {"u"};
  auto out = hl::ordered_union({{2, te}}, {{1, tu}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], tu);
  EXPECT_EQ(out[1], te);
  auto same = hl::ordered_union({}, {{1, tu}, {2, te}});
  EXPECT_EQ(same[1], te);
  try {
    hl::ordered_union({{1, te}}, {{1, tu}});
    FAIL();
  } catch (const hl::Error& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::DuplicateIndex);
  }
}

TEST(Trace, TextRoundTrip) {
  oracle::Rng r(8);
  for (int i = 0; i < 200; ++i) {
    auto ts = oracle::random_trace_set(r, 1 + r.below(3), r.below(5) + 1, r.coin());
    ASSERT_EQ(hl::parse_trace_set(hl::format_trace_set(ts)), ts);
  }
  auto l = hl::parse_label("p q | x=1.5,y=-2");
  EXPECT_TRUE(l.has("q"));
  EXPECT_EQ(l.value("y"), -2.0);
  try {
    (void)l.value("z");
    FAIL();
  } catch (const hl::Error& e) {
    EXPECT_EQ(e.kind(), hl::ErrorKind::UnknownValuation);
  }
}
