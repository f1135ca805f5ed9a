#include <copro/trnkova.hpp>

#include <gtest/gtest.h>

using namespace copro;

namespace {

MonadPtr M(const std::string& s) { return parse_monad(s); }

}  // namespace

TEST(ClosureAtEmpty, ConstantZeroRecoversValues) {
  for (std::size_t k : {1u, 3u}) {
    auto c = M("const0:" + std::to_string(k));
    auto r = closure_at_empty(*c);
    EXPECT_EQ(r.value_at_empty, c->carrier(FinSet::range(1)));
    EXPECT_EQ(r.classification, ClosureKind::ZeroOfClosure);
  }
}

TEST(ClosureAtEmpty, PowersetAndException) {
  auto p = closure_at_empty(*M("powerset"));
  EXPECT_EQ(p.value_at_empty, FinSet{Label::set({})});
  EXPECT_TRUE(p.reflection_bijective);
  auto e = closure_at_empty(*M("exception:2"));
  EXPECT_EQ(e.value_at_empty.size(), 2u);
  EXPECT_TRUE(e.reflection_bijective);
  // Reader has nothing constant on one point.
  EXPECT_TRUE(closure_at_empty(*M("reader:2")).value_at_empty.empty());
}

TEST(ClosureAtEmpty, EqualizerMatchesBruteForce) {
  // Independent: elements of S1 fixed by both maps 1 -> 2 after transport.
  for (auto name : {"maybe", "powerset", "reader:2", "state:2", "exception0:2", "terminal", "terminal0"}) {
    auto s = M(name);
    FinSet one = FinSet::range(1), two = FinSet::range(2);
    std::vector<Label> fixed;
    for (const auto& x : s->carrier(one)) {
      Label a = s->map(FinMap::table(one, two, {Label::num(0)}), x);
      Label b = s->map(FinMap::table(one, two, {Label::num(1)}), x);
      if (a == b) fixed.push_back(x);
    }
    EXPECT_EQ(closure_at_empty(*s).value_at_empty, FinSet(fixed)) << name;
  }
}

TEST(Classify, Builtins) {
  EXPECT_EQ(classify(*M("exception0:1")), ClosureKind::ZeroOfClosure);
  EXPECT_EQ(classify(*M("terminal0")), ClosureKind::ZeroOfClosure);
  EXPECT_EQ(classify(*M("reader:2")), ClosureKind::ZeroOfClosure);
  // (S × ∅)^S is empty.
  EXPECT_EQ(classify(*M("state:2")), ClosureKind::ZeroOfClosure);
  for (auto name : {"powerset", "terminal", "maybe", "exception:3", "pA:1,2"})
    EXPECT_EQ(classify(*M(name)), ClosureKind::AlreadyClosed) << name;
}

TEST(Classify, NonBijectiveReflectionIsRejected) {
  // A functor with two values at ∅ that collapse at 1.
  struct Bad final : MonadSpec {
    std::string name() const override { return "bad"; }
    bool has_structure() const override { return false; }
    Count card(std::size_t n) const override { return Count::of(n == 0 ? 2 : 1); }
    Label map(const FinMap& f, const Label& s) const override { return f.dom().empty() && f.has_cod() && !f.cod().empty() ? Label::num(0) : s; }
    std::optional<Label> unit_preimage(const Label&) const override { return std::nullopt; }
    std::vector<Label> occurring(const Label&) const override { return {}; }

   protected:
    FinSet make_carrier(const FinSet& x) const override { return x.empty() ? FinSet::range(2) : FinSet::range(1); }
  };
  Bad b;
  EXPECT_THROW(classify(b), Error);
  try {
    classify(b);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ClassificationViolation);
  }
}

TEST(MonadClosure, ZeroExceptionClosesToException) {
  auto closed = monad_closure(M("exception0:2"));
  auto plain = M("exception:2");
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(closed->carrier(FinSet::range(n)), plain->carrier(FinSet::range(n)));
  EXPECT_TRUE(check_laws(*closed).ok());
  EXPECT_EQ(classify(*closed), ClosureKind::AlreadyClosed);
}

TEST(MonadClosure, ClosedMonadsAreFixed) {
  for (auto name : {"powerset", "maybe", "exception:2"}) {
    auto s = M(name);
    auto c = monad_closure(s);
    for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(c->carrier(FinSet::range(n)), s->carrier(FinSet::range(n))) << name;
    EXPECT_TRUE(check_laws(*c).ok()) << name;
  }
  EXPECT_THROW(monad_closure(M("terminal")), Error);
  // A zero monad with no constants closes to itself.
  auto st = monad_closure(M("state:2"));
  EXPECT_TRUE(st->carrier(FinSet{}).empty());
  EXPECT_TRUE(check_laws(*st).ok());
}

TEST(ZeroSubmonad, Examples) {
  auto z = zero_submonad(M("exception:2"));
  auto e0 = M("exception0:2");
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(z->carrier(FinSet::range(n)), e0->carrier(FinSet::range(n)));
  EXPECT_TRUE(check_laws(*z).ok());
  auto zt = zero_submonad(M("terminal"));
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(zt->card(n), M("terminal0")->card(n));
  auto zz = zero_submonad(z);
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(zz->carrier(FinSet::range(n)), z->carrier(FinSet::range(n)));
  // Closing the zero submonad gives back the monad.
  auto back = monad_closure(z);
  for (std::size_t n = 0; n <= 3; ++n) EXPECT_EQ(back->carrier(FinSet::range(n)), M("exception:2")->carrier(FinSet::range(n)));
}

TEST(Reflection, UniqueFactorizationThroughConstants) {
  // H = const0:m, K = const:k; a natural s : H -> K is a map m -> k on
  // nonempty sets, forced at ∅. Every such s factors exactly once.
  for (std::size_t m = 1; m <= 3; ++m)
    for (std::size_t k = 1; k <= 3; ++k) {
      auto h = M("const0:" + std::to_string(m));
      auto kk = M("const:" + std::to_string(k));
      FinSet hm = h->carrier(FinSet::range(1)), km = kk->carrier(FinSet::range(1));
      std::size_t naturals = 0;
      for_each_map(hm, km, [&](const FinMap& g) {
        auto s = [&](const FinSet&, const Label& x) { return g(x); };
        EXPECT_EQ(count_factorizations(*h, *kk, s), 1u);
        ++naturals;
        return true;
      });
      EXPECT_EQ(naturals, static_cast<std::size_t>(std::pow(k, m)));
    }
  // Zero exception into maybe through the identity on nonempty sets.
  auto h = M("exception0:1"), k = M("exception:1");
  EXPECT_EQ(count_factorizations(*h, *k, [](const FinSet&, const Label& x) { return x; }), 1u);
}

TEST(Evidence, ExceptionalAndConstant) {
  for (auto name : {"maybe", "exception:2", "exception0:3"}) {
    auto ev = substantially_exceptional(M(name));
    EXPECT_TRUE(ev.exceptional) << name << ": " << ev.note;
  }
  EXPECT_EQ(substantially_exceptional(M("exception0:3")).values.size(), 3u);
  for (auto name : {"powerset", "reader:2", "state:2"}) {
    auto ev = substantially_exceptional(M(name));
    EXPECT_FALSE(ev.exceptional) << name;
    EXPECT_FALSE(ev.constant) << name;
    EXPECT_NE(ev.note.find("probe-level"), std::string::npos);
  }
  auto c = substantially_exceptional(M("const0:2"));
  EXPECT_TRUE(c.constant);
  EXPECT_FALSE(c.exceptional);
  EXPECT_EQ(c.values.size(), 2u);
  // The terminal monad is the constant 1, not X + E.
  EXPECT_FALSE(substantially_exceptional(M("terminal")).exceptional);
  EXPECT_TRUE(substantially_exceptional(M("terminal")).constant);
}
