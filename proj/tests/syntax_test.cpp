#include <gtest/gtest.h>

#include <random>

#include "sbck/syntax.hpp"
#include "sbck/testkit.hpp"

using namespace sbck;

namespace {

Behaviour leaf() { return Behaviour::success(); }

ErrorKind error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const SyntaxError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "parsed: " << text;
  return ErrorKind::Syntax;
}

std::vector<WellFormedBehaviour> samples(std::size_t n, std::uint64_t seed) {
  testkit::GenParams p;
  testkit::Rng rng(seed);
  std::vector<WellFormedBehaviour> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testkit::gen_behaviour(p, rng));
  return out;
}

}  // namespace

TEST(Parse, Success) {
  WellFormedBehaviour b = parse("1");
  EXPECT_TRUE(b->is_success());
}

TEST(Parse, HolidayClient) {
  auto expected = Behaviour::external({
      {"sea", Behaviour::external({{"house", leaf()}, {"bung", leaf()}})},
      {"mount", Behaviour::external({{"house", leaf()}})},
  });
  WellFormedBehaviour b = parse("sea.(house + bung) + mount.house");
  EXPECT_TRUE(b.term().identical(expected));
  EXPECT_FALSE(b->checkpointed());
}

TEST(Parse, CheckpointedServer) {
  auto expected = Behaviour::internal(
      {
          {"sea", Behaviour::internal({{"house", leaf()}, {"bung", leaf()}}, true)},
          {"mount", Behaviour::internal({{"house", leaf()}})},
      },
      true);
  WellFormedBehaviour b = parse("^(!sea.^(!house (+) !bung) (+) !mount.!house)");
  EXPECT_TRUE(b.term().identical(expected));
}

TEST(Parse, CheckpointOnSinglePrefix) {
  WellFormedBehaviour b = parse("^a.b");
  ASSERT_EQ(b->kind(), Kind::External);
  EXPECT_TRUE(b->checkpointed());
  ASSERT_EQ(b->branches().size(), 1u);
  EXPECT_FALSE(b->branches()[0].next.checkpointed());
  // In a continuation the checkpoint covers one prefix only.
  WellFormedBehaviour c = parse("x.^a + b");
  EXPECT_EQ(c->branches().size(), 2u);
  EXPECT_TRUE(c->find("x")->checkpointed());
}

TEST(Parse, CommentsAndWhitespace) {
  WellFormedBehaviour b = parse("# a comment\n  a .\n\tb # trailing\n");
  EXPECT_EQ(b, parse("a.b"));
}

TEST(Parse, Recursion) {
  WellFormedBehaviour b = parse("rec x. a.x + b");
  ASSERT_EQ(b->kind(), Kind::Rec);
  EXPECT_EQ(b->hint(), "x");
  const Behaviour* next = b->body().find("a");
  ASSERT_NE(next, nullptr);
  EXPECT_EQ(next->kind(), Kind::Var);
  EXPECT_EQ(next->index(), 0u);
}

TEST(Parse, AlphaEquivalentBindersAreEqual) {
  EXPECT_EQ(parse("rec x. a.x"), parse("rec y. a.y"));
  EXPECT_EQ(parse("rec x. a.rec y. b.x"), parse("rec p. a.rec q. b.p"));
  EXPECT_NE(parse("rec x. a.rec y. b.x"), parse("rec x. a.rec y. b.y"));
}

TEST(Parse, BranchOrderIgnoredByEquality) {
  EXPECT_EQ(parse("a + b.c"), parse("b.c + a"));
  EXPECT_FALSE(parse("a + b").term().identical(parse("b + a").term()));
  EXPECT_EQ(parse("a + b").term().hash(), parse("b + a").term().hash());
}

TEST(Parse, Errors) {
  EXPECT_EQ(error_of("a.1 + !b.1"), ErrorKind::MixedChoice);
  EXPECT_EQ(error_of("a + b (+) c"), ErrorKind::MixedChoice);
  EXPECT_EQ(error_of("!a (+) b"), ErrorKind::MixedChoice);
  EXPECT_EQ(error_of("a + a"), ErrorKind::DuplicateLabel);
  EXPECT_EQ(error_of("!a.b (+) !a"), ErrorKind::DuplicateLabel);
  EXPECT_EQ(error_of("rec x. x"), ErrorKind::UnguardedRecursion);
  EXPECT_EQ(error_of("rec x. rec y. x"), ErrorKind::UnguardedRecursion);
  EXPECT_EQ(error_of("^1"), ErrorKind::CheckpointOnNonChoice);
  EXPECT_EQ(error_of("^(rec x. a.x)"), ErrorKind::CheckpointOnNonChoice);
  EXPECT_EQ(error_of("^^a"), ErrorKind::CheckpointOnNonChoice);
  EXPECT_EQ(error_of("a $ b"), ErrorKind::Lexical);
  EXPECT_EQ(error_of("1abc"), ErrorKind::Lexical);
  EXPECT_EQ(error_of("a +"), ErrorKind::Syntax);
  EXPECT_EQ(error_of("(a"), ErrorKind::Syntax);
  EXPECT_EQ(error_of(""), ErrorKind::Syntax);
  EXPECT_EQ(error_of("a b"), ErrorKind::Syntax);
}

TEST(Parse, ErrorPosition) {
  try {
    parse("a.(b +\n  !c)");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MixedChoice);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(WellFormed, RejectsFreeVariable) {
  auto open = Behaviour::external({{"a", Behaviour::var(0)}});
  try {
    WellFormedBehaviour::validate(open);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FreeVariable);
  }
  EXPECT_NO_THROW(WellFormedBehaviour::validate(Behaviour::rec("x", open)));
}

TEST(WellFormed, RejectsUnguardedAndDuplicates) {
  EXPECT_THROW(WellFormedBehaviour::validate(Behaviour::rec("x", Behaviour::var(0))), SyntaxError);
  auto dup = Behaviour::external({{"a", leaf()}, {"a", leaf()}});
  EXPECT_THROW(WellFormedBehaviour::validate(dup), SyntaxError);
  EXPECT_THROW(WellFormedBehaviour::validate(Behaviour::external({})), SyntaxError);
  EXPECT_THROW(WellFormedBehaviour::validate(Behaviour::external({{"9a", leaf()}})), SyntaxError);
}

TEST(Render, Examples) {
  EXPECT_EQ(render(Behaviour::success()), "1");
  EXPECT_EQ(render(dual(parse("sea.(house + bung) + mount.house")).term()),
            "!sea.(!house (+) !bung) (+) !mount.!house");
  EXPECT_EQ(render(parse("^(!sea.^(!house (+) !bung) (+) !mount.!house)").term()),
            "^(!sea.^(!house (+) !bung) (+) !mount.!house)");
  EXPECT_EQ(render(parse("rec x. a.x").term()), "rec x. a.x");
  EXPECT_EQ(render(parse("a.1").term()), "a");
}

TEST(Render, HintClashingWithLabelIsRenamed) {
  auto b = WellFormedBehaviour::validate(Behaviour::rec("a", Behaviour::external({{"a", Behaviour::var(0)}})));
  std::string text = render(b.term());
  EXPECT_EQ(parse(text), b);
  EXPECT_NE(text, "rec a. a.a");
}

TEST(Render, RoundTripOnGeneratedTerms) {
  for (const auto& b : samples(1000, 7)) {
    std::string text = render(b.term());
    WellFormedBehaviour back = parse(text);
    ASSERT_TRUE(back.term().identical(b.term())) << text;
  }
}

TEST(Dual, Examples) {
  EXPECT_EQ(dual(parse("sea.(house + bung) + mount.house")), parse("!sea.(!house (+) !bung) (+) !mount.!house"));
  EXPECT_EQ(dual(parse("1")), parse("1"));
  EXPECT_EQ(dual(parse("^(a + b)")), parse("^(!a (+) !b)"));
  EXPECT_EQ(dual(parse("rec x. a.!b.x")), parse("rec x. !a.b.x"));
}

TEST(Dual, InvolutionAndCommutation) {
  for (const auto& b : samples(1000, 8)) {
    ASSERT_TRUE(dual(dual(b)).term().identical(b.term())) << render(b.term());
    ASSERT_EQ(erase(dual(b)), dual(erase(b))) << render(b.term());
  }
}

TEST(Erase, Examples) {
  EXPECT_EQ(erase(parse("^(a.1 + b.1)")), parse("a.1 + b.1"));
  EXPECT_EQ(erase(parse("1")), parse("1"));
  for (const auto& b : samples(500, 9)) {
    ASSERT_FALSE(has_checkpoint(erase(b).term()));
  }
}

TEST(Unfold, Examples) {
  EXPECT_EQ(unfold(parse("rec x. a.x")), parse("a.(rec x. a.x)"));
  EXPECT_EQ(unfold(parse("1")), parse("1"));
  EXPECT_EQ(unfold(parse("rec x. rec y. a.x + b.y")), parse("a.(rec x. rec y. a.x + b.y) + b.(rec y. a.(rec x. rec y. a.x + b.y) + b.y)"));
}

TEST(Unfold, Idempotent) {
  for (const auto& b : samples(1000, 10)) {
    WellFormedBehaviour once = unfold(b);
    ASSERT_NE(once->kind(), Kind::Rec);
    ASSERT_EQ(unfold(once), once);
  }
}

TEST(Closure, Examples) {
  StateClosure loop = state_closure(parse("rec x. a.x"));
  EXPECT_EQ(loop.size(), 2u);
  EXPECT_TRUE(loop.contains(parse("rec x. a.x")));
  EXPECT_TRUE(loop.contains(parse("a.(rec x. a.x)")));
  EXPECT_EQ(state_closure(parse("1")).size(), 1u);
  EXPECT_EQ(state_closure(parse("sea.(house + bung) + mount.house")).size(), 4u);
}

TEST(Closure, BoundedAndClosed) {
  for (const auto& b : samples(1000, 11)) {
    StateClosure c = state_closure(b);
    ASSERT_LE(c.size(), b->size()) << render(b.term());
    for (const auto& s : c.states) {
      if (s->kind() == Kind::Rec) {
        ASSERT_TRUE(c.contains(unfold_once(s.term())));
      } else {
        for (const auto& br : s->branches()) ASSERT_TRUE(c.contains(branch_target(s, br.label).term()));
      }
    }
  }
}

TEST(Closure, Cap) {
  EXPECT_THROW(state_closure(parse("a.b.c.d"), 2), StateCapExceeded);
}
