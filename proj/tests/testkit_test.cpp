#include <gtest/gtest.h>

#include "sbck/compliance.hpp"
#include "sbck/testkit.hpp"

using namespace sbck;
using namespace sbck::testkit;

TEST(Gen, Deterministic) {
  GenParams p;
  p.seed = 42;
  EXPECT_TRUE(gen_behaviour(p).term().identical(gen_behaviour(p).term()));
  Pair a = gen_pair(p, 9, true);
  Pair b = gen_pair(p, 9, true);
  EXPECT_TRUE(a.client.term().identical(b.client.term()));
  EXPECT_TRUE(a.server.term().identical(b.server.term()));
}

TEST(Gen, DepthOne) {
  GenParams p;
  p.max_depth = 1;
  for (std::uint64_t s = 0; s < 200; ++s) {
    p.seed = s;
    WellFormedBehaviour b = gen_behaviour(p);
    ASSERT_LE(depth(b.term()), 1u);
    const Behaviour& head = b->kind() == Kind::Rec ? b->body() : b.term();
    for (const auto& br : head.branches()) {
      ASSERT_TRUE(br.next.is_success() || br.next.kind() == Kind::Var);
    }
  }
}

TEST(Gen, RespectsParams) {
  GenParams p;
  p.alphabet = {"x"};
  p.p_checkpoint = 0;
  p.p_rec = 0;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    WellFormedBehaviour b = gen_behaviour(p, rng);
    ASSERT_FALSE(has_checkpoint(b.term()));
    ASSERT_LE(depth(b.term()), p.max_depth);
    for (const auto& s : state_closure(b).states) {
      ASSERT_NE(s->kind(), Kind::Rec);
      ASSERT_LE(s->branches().size(), 1u);
    }
  }
}

TEST(Gen, InvalidParams) {
  GenParams p;
  p.max_depth = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.alphabet.clear();
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.p_rec = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.alphabet = {"not valid"};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Gen, Coverage) {
  GenParams p;
  Rng rng(1);
  Coverage total;
  for (int i = 0; i < 10000; ++i) {
    Coverage c = coverage_of(gen_behaviour(p, rng).term());
    total.checkpointed_external |= c.checkpointed_external;
    total.checkpointed_internal |= c.checkpointed_internal;
    total.recursion_through_checkpoint |= c.recursion_through_checkpoint;
  }
  EXPECT_TRUE(total.checkpointed_external);
  EXPECT_TRUE(total.checkpointed_internal);
  EXPECT_TRUE(total.recursion_through_checkpoint);
}

TEST(Coverage, Detects) {
  EXPECT_TRUE(coverage_of(parse("rec x. ^(a.x)")).recursion_through_checkpoint);
  EXPECT_TRUE(coverage_of(parse("rec x. a.^(!b.x)")).recursion_through_checkpoint);
  EXPECT_FALSE(coverage_of(parse("rec x. a.x + b.^c")).recursion_through_checkpoint);
  EXPECT_FALSE(coverage_of(parse("^(a.rec x. b.x)")).recursion_through_checkpoint);
  EXPECT_TRUE(coverage_of(parse("^(!a)")).checkpointed_internal);
  EXPECT_FALSE(coverage_of(parse("^(!a)")).checkpointed_external);
}

TEST(Mutate, StaysWellFormedAndChanges) {
  GenParams p;
  Rng rng(5);
  int changed = 0;
  for (int i = 0; i < 500; ++i) {
    WellFormedBehaviour b = gen_behaviour(p, rng);
    WellFormedBehaviour m = mutate(b, p, rng);
    changed += !(m == b);
  }
  EXPECT_GT(changed, 400);
  WellFormedBehaviour one = parse("1");
  EXPECT_EQ(mutate(one, p, rng), one);
}

TEST(Props, VacuousAndPinned) {
  GenParams p;
  PropertyReport d = prop_duality(0, p);
  EXPECT_TRUE(d.passed());
  EXPECT_EQ(d.trials, d.pinned);
  EXPECT_GE(d.pinned, 1u);
  PropertyReport e = prop_checker_equivalence(0, p);
  EXPECT_TRUE(e.passed());
  EXPECT_GE(e.pinned, 5u);
  PropertyReport c = prop_conservativity(0, p);
  EXPECT_TRUE(c.passed());
  // The blocked output pair and the unfair server are skipped.
  EXPECT_GE(c.skipped, 2u);
}

TEST(Props, SmallRuns) {
  GenParams p;
  p.seed = 77;
  for (auto r : {prop_duality(100, p), prop_conservativity(100, p), prop_checker_equivalence(100, p),
                 prop_evidence(100, p)}) {
    EXPECT_TRUE(r.passed()) << to_text(r);
    EXPECT_EQ(r.trials, 100 + r.pinned);
  }
}

TEST(Props, ReportFormats) {
  PropertyReport r;
  r.property = "demo";
  r.trials = 3;
  r.failures.push_back({12, "a", "!b", "broken"});
  EXPECT_FALSE(r.passed());
  EXPECT_NE(to_text(r).find("seed=12"), std::string::npos);
  nlohmann::json j = to_json(r);
  EXPECT_EQ(j["property"], "demo");
  EXPECT_EQ(j["failures"][0]["seed"], 12);
  EXPECT_EQ(j["failures"][0]["server"], "!b");
  EXPECT_EQ(j["skipped"], 0);
}

TEST(Enumerate, Counts) {
  EXPECT_EQ(enumerate_behaviours(0, {"a", "b"}, false).size(), 1u);
  // 1 + 2 kinds * 2 flags * (|{a}| + |{b}| + |{a,b}|) shapes
  EXPECT_EQ(enumerate_behaviours(1, {"a", "b"}, false).size(), 13u);
  auto d2 = enumerate_behaviours(2, {"a", "b"}, false);
  EXPECT_EQ(d2.size(), 1u + 4u * (13u + 13u + 169u));
  for (const auto& b : d2) ASSERT_LE(depth(b.term()), 2u);
  auto rec = enumerate_behaviours(1, {"a", "b"}, true);
  EXPECT_GT(rec.size(), 13u);
}

TEST(Exhaustive, DepthOne) {
  auto terms = enumerate_behaviours(1, {"a", "b"}, true);
  EXPECT_TRUE(exhaustive_duality(terms).passed());
  auto eq = exhaustive_checker_equivalence(terms);
  EXPECT_TRUE(eq.passed()) << to_text(eq);
  EXPECT_EQ(eq.trials, terms.size() * terms.size());
  EXPECT_TRUE(exhaustive_conservativity(terms).passed());
}

TEST(Shrink, CandidatesAreSmaller) {
  WellFormedBehaviour b = parse("a.(b + c) + d");
  auto cands = shrink_candidates(b);
  // Drop a or d, drop b or c, and replace each of the two choices by 1.
  EXPECT_EQ(cands.size(), 6u);
  for (const auto& c : cands) EXPECT_LT(c->size(), b->size());
}

TEST(Shrink, LocallyMinimal) {
  // Fails whenever the client offers b somewhere.
  auto offers_b = [](const Pair& p) {
    for (const auto& s : state_closure(p.client).states) {
      if (s->is_choice() && s->find("b") != nullptr) return true;
    }
    return false;
  };
  Pair start{parse("a.(b + c.d) + d.!e"), parse("!a.(!b (+) !c)")};
  ASSERT_TRUE(offers_b(start));
  Pair small = shrink_pair(start, offers_b);
  EXPECT_TRUE(offers_b(small));
  EXPECT_EQ(small.client, parse("a.b"));
  EXPECT_EQ(small.server, parse("1"));
  for (const auto& c : shrink_candidates(small.client)) EXPECT_FALSE(offers_b({c, small.server}));
}
