#include <copro/finset.hpp>

#include <gtest/gtest.h>

using namespace copro;

namespace {

Label a() { return Label::sym("a"); }
Label b() { return Label::sym("b"); }

std::vector<FinSet> small_sets() { return {FinSet::range(0), FinSet::range(1), FinSet::range(2), FinSet::range(3)}; }

}  // namespace

TEST(Label, SharingAndOrder) {
  EXPECT_EQ(Label::inj(1, a()), Label::inj(1, a()));
  EXPECT_NE(Label::inj(0, a()), Label::inj(1, a()));
  EXPECT_LT(Label::inj(0, b()), Label::inj(1, a()));
  EXPECT_EQ(Label::set({b(), a(), a()}), Label::set({a(), b()}));
  EXPECT_LT(Label::set({}), Label::set({a()}));
  EXPECT_EQ(Label::set({a(), b()}).str(), "{a,b}");
  EXPECT_EQ(Label::tuple({Label::num(1), Label::inj(0, a())}).str(), "(1,in0(a))");
}

TEST(FinSet, DistinctAndDeterministic) {
  FinSet s{b(), a(), b()};
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], a());
  EXPECT_EQ(FinSet({a(), b()}), s);
  EXPECT_EQ(s.index_of(b()), 1u);
  EXPECT_FALSE(s.contains(Label::num(0)));
}

TEST(Coproduct, Sizes) {
  EXPECT_EQ(coproduct(FinSet{a()}, FinSet{b()}).set.size(), 2u);
  EXPECT_EQ(coproduct(FinSet::range(2), FinSet::range(1)).set.size(), 3u);
  auto c = coproduct(FinSet{}, FinSet::range(3));
  EXPECT_TRUE(is_bijective(FinMap(c.inr.dom(), c.set, c.inr.fn())));
}

TEST(Coproduct, RangesPartitionAndTagsRecoverable) {
  auto c = coproduct(FinSet::range(2), FinSet::range(2));
  std::size_t left = 0, right = 0;
  for (const auto& z : c.set) (z.tag() == 0 ? left : right)++;
  EXPECT_EQ(left, 2u);
  EXPECT_EQ(right, 2u);
  EXPECT_TRUE(is_injective(c.inl));
  EXPECT_TRUE(is_injective(c.inr));
  for (const auto& x : FinSet::range(2)) EXPECT_NE(c.inl(x), c.inr(x));
}

TEST(Coproduct, UniversalProperty) {
  for (const auto& x : small_sets())
    for (const auto& y : small_sets()) {
      auto c = coproduct(x, y);
      for (std::size_t w = 0; w <= 4; ++w) {
        FinSet ws = FinSet::range(w);
        if (c.set.size() > 4) continue;
        for_each_map(x, ws, [&](const FinMap& u) {
          for_each_map(y, ws, [&](const FinMap& v) {
            int count = 0;
            for_each_map(c.set, ws, [&](const FinMap& m) {
              if (same_on_domain(compose(m, c.inl), u) && same_on_domain(compose(m, c.inr), v)) ++count;
              return true;
            });
            EXPECT_EQ(count, 1);
            return true;
          });
          return true;
        });
      }
    }
}

TEST(FinMap, CompositionAssociativeAndIdentityUnits) {
  FinSet x = FinSet::range(2), y = FinSet::range(2), z = FinSet::range(3), w = FinSet::range(2);
  for_each_map(x, y, [&](const FinMap& f) {
    EXPECT_TRUE(same_on_domain(compose(FinMap::identity(y), f), f));
    EXPECT_TRUE(same_on_domain(compose(f, FinMap::identity(x)), f));
    for_each_map(y, z, [&](const FinMap& g) {
      for_each_map(z, w, [&](const FinMap& h) {
        EXPECT_TRUE(same_on_domain(compose(compose(h, g), f), compose(h, compose(g, f))));
        return true;
      });
      return true;
    });
    return true;
  });
}

TEST(Equalizer, Basics) {
  FinSet x = FinSet::range(3);
  auto e = equalizer(FinMap::identity(x), FinMap::identity(x));
  EXPECT_EQ(e.set, x);
  FinMap f = FinMap::table(x, x, {Label::num(0), Label::num(0), Label::num(2)});
  auto e2 = equalizer(f, FinMap::identity(x));
  EXPECT_EQ(e2.set, FinSet({Label::num(0), Label::num(2)}));
  EXPECT_THROW(equalizer(FinMap::identity(x), FinMap::identity(FinSet::range(2))), Error);
}

TEST(Equalizer, UniversalProperty) {
  FinSet x = FinSet::range(3), y = FinSet::range(2);
  for_each_map(x, y, [&](const FinMap& f) {
    for_each_map(x, y, [&](const FinMap& g) {
      auto e = equalizer(f, g);
      for (std::size_t t = 0; t <= 2; ++t) {
        FinSet ts = FinSet::range(t);
        for_each_map(ts, x, [&](const FinMap& k) {
          if (!same_on_domain(compose(f, k), compose(g, k))) return true;
          int count = 0;
          for_each_map(ts, e.set, [&](const FinMap& u) {
            if (same_on_domain(compose(e.inclusion, u), k)) ++count;
            return true;
          });
          EXPECT_EQ(count, 1);
          return true;
        });
      }
      return true;
    });
    return true;
  });
}

TEST(IsInjective, Examples) {
  FinSet two = FinSet::range(2);
  EXPECT_TRUE(is_injective(FinMap::identity(two)));
  EXPECT_FALSE(is_injective(FinMap::table(two, FinSet::range(1), {Label::num(0), Label::num(0)})));
  EXPECT_TRUE(is_injective(coproduct(two, two).inl));
}

TEST(SearchBijection, Examples) {
  FinSet one{a()};
  auto id = search_bijection(one, one, [](const FinMap&) { return true; });
  ASSERT_TRUE(id);
  EXPECT_EQ((*id)(a()), a());
  EXPECT_FALSE(search_bijection(FinSet::range(2), FinSet::range(3), [](const FinMap&) { return true; }));
  EXPECT_THROW(search_bijection(FinSet::range(9), FinSet::range(9), [](const FinMap&) { return true; }), Error);
}

TEST(SearchBijection, EquivariantUnderInvolutions) {
  // Swaps on both sides; both bijections are equivariant, so pin f(a) = 1.
  FinSet x{a(), b()}, y = FinSet::range(2);
  FinMap sigma = FinMap::table(x, x, {b(), a()});
  FinMap tau = FinMap::table(y, y, {Label::num(1), Label::num(0)});
  int oracle = 0;
  for_each_map(x, y, [&](const FinMap& f) {
    if (is_bijective(f) && same_on_domain(compose(f, sigma), compose(tau, f)) && f(a()) == Label::num(1)) ++oracle;
    return true;
  });
  ASSERT_EQ(oracle, 1);
  auto found = search_bijection(x, y, [&](const FinMap& f) {
    return same_on_domain(compose(f, sigma), compose(tau, f)) && f(a()) == Label::num(1);
  });
  ASSERT_TRUE(found);
  EXPECT_EQ((*found)(b()), Label::num(0));
}

TEST(Count, Saturation) {
  EXPECT_EQ(Count::pow(Count::of(2), Count::of(10)).value, 1024u);
  EXPECT_TRUE(Count::pow(Count::of(2), Count::of(70)).saturated);
  EXPECT_EQ((Count::huge() * Count::of(0)).value, 0u);
}
