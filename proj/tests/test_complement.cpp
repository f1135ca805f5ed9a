#include <copro/complement.hpp>

#include <gtest/gtest.h>

using namespace copro;

namespace {

std::vector<std::string> consistent_builtins() {
  return {"exception:1", "exception:2", "exception0:1", "maybe", "powerset", "reader:2", "state:2"};
}

Label n(int i) { return Label::num(i); }

}  // namespace

TEST(Complement, Examples) {
  auto p = complement(parse_monad("powerset"));
  EXPECT_EQ(p.carrier_at(FinSet::range(2)), FinSet({Label::set({}), Label::set({n(0), n(1)})}));
  auto ex = complement(parse_monad("exception:2"));
  for (std::size_t k = 0; k <= 3; ++k)
    EXPECT_EQ(ex.carrier_at(FinSet::range(k)), FinSet({Label::inj(1, Label::sym("e0")), Label::inj(1, Label::sym("e1"))}));
  EXPECT_EQ(complement(parse_monad("maybe")).carrier_at(FinSet::range(3)).size(), 1u);
}

TEST(Complement, RejectsInconsistent) {
  for (auto name : {"terminal", "terminal0"}) {
    try {
      complement(parse_monad(name));
      FAIL() << name;
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), Errc::InconsistentMonad);
    }
  }
}

TEST(Complement, PartitionsCarrier) {
  for (auto name : consistent_builtins()) {
    auto s = parse_monad(name);
    auto v = complement(s);
    for (std::size_t k = 0; k <= 3; ++k) {
      FinSet x = FinSet::range(k);
      FinSet bar = v.carrier_at(x);
      FinSet sx = s->carrier(x);
      EXPECT_EQ(bar.size() + k, sx.size()) << name;
      for (const auto& a : x) EXPECT_FALSE(bar.contains(s->unit(a))) << name;
      EXPECT_EQ(v.card(k).value, bar.size()) << name;
    }
  }
}

TEST(Complement, SubfunctorOnInjections) {
  for (auto name : consistent_builtins()) {
    auto s = parse_monad(name);
    auto v = complement(s);
    for (std::size_t i = 0; i <= 3; ++i)
      for (std::size_t j = i; j <= 3; ++j)
        for_each_injection(FinSet::range(i), FinSet::range(j), [&](const FinMap& m) {
          FinSet target = v.carrier_at(m.cod());
          for (const auto& e : v.carrier_at(m.dom())) {
            Label out = complement_action(v, m, e);
            EXPECT_TRUE(target.contains(out)) << name << " " << e.str();
            EXPECT_EQ(out, s->map(m, e));
          }
          return true;
        });
  }
}

TEST(Complement, ActionExamples) {
  auto v = complement(parse_monad("powerset"));
  FinMap incl = FinMap::inclusion(FinSet::range(2), FinSet::range(3));
  EXPECT_EQ(complement_action(v, incl, Label::set({n(0), n(1)})), Label::set({n(0), n(1)}));
  FinMap collapse = FinMap::table(FinSet::range(2), FinSet::range(1), {n(0), n(0)});
  try {
    complement_action(v, collapse, Label::set({n(0), n(1)}));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::NotInjective);
  }
  EXPECT_THROW(v.action_on_injection(collapse), Error);
  auto ex = complement(parse_monad("exception:1"));
  Label e0 = Label::inj(1, Label::sym("e0"));
  EXPECT_EQ(complement_action(ex, incl, e0), e0);
}

TEST(MinimalSupport, Examples) {
  auto p = parse_monad("powerset");
  FinSet three = FinSet::range(3);
  EXPECT_EQ(minimal_support(*p, three, Label::set({n(0), n(2)})), (std::vector<Label>{n(0), n(2)}));
  EXPECT_EQ(minimal_support(*p, three, Label::set({})), std::vector<Label>{});
  EXPECT_EQ(minimal_support(*p, three, p->unit(n(1))), std::vector<Label>{n(1)});
  auto ex = parse_monad("exception:1");
  EXPECT_TRUE(minimal_support(*ex, three, Label::inj(1, Label::sym("e0"))).empty());
  auto r = parse_monad("reader:2");
  EXPECT_EQ(minimal_support(*r, three, Label::tuple({n(2), n(0)})), (std::vector<Label>{n(0), n(2)}));
}

TEST(MinimalSupport, AmbiguousConstantWhenEmptyIsNotAvailable) {
  // In exception0 the constant is absent at ∅ and every singleton supports it.
  auto ex0 = parse_monad("exception0:1");
  try {
    minimal_support(*ex0, FinSet::range(2), Label::inj(1, Label::sym("e0")));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::AmbiguousSupport);
  }
  // A one-element set has one candidate.
  EXPECT_EQ(minimal_support(*ex0, FinSet::range(1), Label::inj(1, Label::sym("e0"))), std::vector<Label>{n(0)});
}

TEST(MinimalSupport, IsLeastAmongAllSupportsByBruteForce) {
  // Oracle: the intersection of all supporting subsets, found by listing every subset.
  for (auto name : {"powerset", "reader:2", "state:2", "maybe"}) {
    auto s = parse_monad(name);
    FinSet x = FinSet::range(3);
    for (const auto& e : s->carrier(x)) {
      std::vector<std::vector<Label>> supports;
      for (unsigned mask = 0; mask < 8; ++mask) {
        std::vector<Label> u;
        for (int i = 0; i < 3; ++i)
          if (mask & (1u << i)) u.push_back(n(i));
        FinSet us = FinSet(u);
        bool hit = false;
        for (const auto& c : s->carrier(us))
          if (s->map(FinMap::inclusion(us, x), c) == e) hit = true;
        if (hit) supports.push_back(u);
      }
      ASSERT_FALSE(supports.empty());
      auto least = *std::min_element(supports.begin(), supports.end(),
                                     [](auto& a, auto& b) { return a.size() < b.size(); });
      for (const auto& u : supports)
        for (const auto& a : least) EXPECT_NE(std::find(u.begin(), u.end(), a), u.end()) << name << " " << e.str();
      EXPECT_EQ(minimal_support(*s, x, e), least) << name << " " << e.str();
    }
  }
}

TEST(MinimalSupport, ComplementAgreesWithBase) {
  // Computed from S̄ (restricting to non-units) the least support is unchanged.
  auto s = parse_monad("powerset");
  auto v = complement(s);
  FinSet x = FinSet::range(3);
  for (const auto& e : v.carrier_at(x)) {
    auto u = minimal_support(*s, x, e);
    FinSet us(u);
    bool found = false;
    for (const auto& c : v.carrier_at(us))
      if (s->map(FinMap::inclusion(us, x), c) == e) found = true;
    EXPECT_TRUE(found) << e.str();
  }
}
