#include <copro/bialgebra.hpp>

#include <gtest/gtest.h>

using namespace copro;

namespace {

Label n(int i) { return Label::num(i); }

/// Every EM algebra by brute force over all maps S r -> r.
std::size_t brute_force_count(const MonadPtr& s, const FinSet& r) {
  std::size_t count = 0;
  for_each_map(s->carrier(r), r, [&](const FinMap& alg) {
    if (!em_violation(*s, r, alg)) ++count;
    return true;
  });
  return count;
}

}  // namespace

TEST(EMAlgebras, Examples) {
  EXPECT_EQ(enumerate_em_algebras(parse_monad("terminal"), FinSet::range(1)).size(), 1u);
  EXPECT_EQ(enumerate_em_algebras(parse_monad("maybe"), FinSet::range(1)).size(), 1u);
  // Bounded-lattice structures on two points: join with either point as bottom.
  EXPECT_EQ(enumerate_em_algebras(parse_monad("powerset"), FinSet::range(2)).size(), 2u);
}

TEST(EMAlgebras, EnumerationMatchesBruteForce) {
  for (auto name : {"maybe", "exception:2", "exception0:1", "powerset", "reader:2"})
    for (std::size_t k = 0; k <= 2; ++k) {
      auto s = parse_monad(name);
      FinSet r = FinSet::range(k);
      auto algs = enumerate_em_algebras(s, r);
      EXPECT_EQ(algs.size(), brute_force_count(s, r)) << name << " " << k;
      for (const auto& a : algs) EXPECT_FALSE(check_em(a).has_value());
    }
}

TEST(EMAlgebras, BoundIsEnforced) {
  auto p = parse_monad("powerset");
  try {
    enumerate_em_algebras(p, FinSet::range(3), 10);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::BudgetExceeded);
  }
}

TEST(Transport, IdentityAndRoundTrip) {
  auto s = parse_monad("powerset");
  auto free = free_algebra(s, FinSet::range(2));
  auto same = transport(free.algebra, FinMap::identity(free.algebra.carrier));
  EXPECT_TRUE(same_on_domain(same.structure, free.algebra.structure));
  // Relabel the four subsets as symbols.
  FinSet y = FinSet::symbols("b", 4);
  FinMap i = FinMap::table(free.algebra.carrier, y, y.elements());
  auto moved = transport(free.algebra, i);
  EXPECT_FALSE(check_em(moved).has_value());
  auto back = transport(moved, inverse(i));
  EXPECT_TRUE(same_on_domain(back.structure, free.algebra.structure));
  try {
    transport(free.algebra, FinMap::table(free.algebra.carrier, y, {y[0], y[0], y[1], y[2]}));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::NotBijective);
  }
}

TEST(FreeAlgebra, Examples) {
  EXPECT_EQ(free_algebra(parse_monad("exception:2"), FinSet::range(1)).algebra.carrier.size(), 3u);
  EXPECT_EQ(free_algebra(parse_monad("powerset"), FinSet::range(1)).algebra.carrier.size(), 2u);
  EXPECT_EQ(free_algebra(parse_monad("maybe"), FinSet::range(2)).algebra.carrier.size(), 3u);
}

TEST(FreeAlgebra, UniversalPropertyExhaustive) {
  for (auto name : {"maybe", "exception:2", "powerset", "reader:2"})
    for (std::size_t na = 0; na <= 2; ++na) {
      auto s = parse_monad(name);
      FinSet a = FinSet::range(na);
      auto fa = free_algebra(s, a);
      if (fa.algebra.carrier.size() > 9) continue;
      for (std::size_t k = 0; k <= 3; ++k) {
        if (std::string(name) == "reader:2" && k == 3) continue;
        FinSet r = FinSet::range(k);
        for (const auto& b : enumerate_em_algebras(s, r)) {
          for_each_map(a, r, [&](const FinMap& h) {
            std::size_t count = 0;
            for_each_map(fa.algebra.carrier, r, [&](const FinMap& g) {
              for (const auto& x : a)
                if (g(fa.unit(x)) != h(x)) return true;
              for (const auto& v : fa.algebra.structure.dom())
                if (g(fa.algebra(v)) != b(s->map(g, v))) return true;
              ++count;
              return true;
            });
            EXPECT_EQ(count, 1u) << name << " |A|=" << na << " |B|=" << k;
            return true;
          });
        }
      }
    }
}

TEST(Multialgebras, ProductOfPerMonadChoices) {
  auto m = parse_monad("maybe");
  auto p = parse_monad("powerset");
  for (std::size_t k = 0; k <= 2; ++k) {
    std::size_t expected = enumerate_em_algebras(m, FinSet::range(k)).size() *
                           enumerate_em_algebras(p, FinSet::range(k)).size();
    std::size_t got = 0;
    for (const auto& b : enumerate_multialgebras({m, p}, 2))
      if (b.carrier.size() == k) ++got;
    EXPECT_EQ(got, expected) << k;
  }
}

TEST(Multialgebras, TrialgebraPoint) {
  auto e = parse_monad("exception:2");
  FinSet r = FinSet::range(2);
  auto algs = enumerate_em_algebras(e, r);
  ASSERT_EQ(algs.size(), 4u);
  for (const auto& a : algs) {
    FinMap pt = trialgebra_point(a, FinSet::symbols("e", 2));
    EXPECT_EQ(pt(Label::sym("e0")), a(Label::inj(1, Label::sym("e0"))));
    EXPECT_EQ(pt(Label::sym("e1")), a(Label::inj(1, Label::sym("e1"))));
  }
}

TEST(InitialMultialgebra, MaybeMaybe) {
  auto m = parse_monad("maybe");
  auto rep = verify_initial_multialgebra({m, m}, 3);
  EXPECT_TRUE(rep.ok) << rep.failure;
  EXPECT_EQ(rep.carrier_size, 2u);
  EXPECT_GT(rep.targets, 0u);
}

TEST(InitialMultialgebra, ExceptionPairAndPowersetException) {
  auto e = parse_monad("exception:1");
  auto rep = verify_initial_multialgebra({e, e}, 3);
  EXPECT_TRUE(rep.ok) << rep.failure;
  EXPECT_EQ(rep.carrier_size, 2u);
  auto rep2 = verify_initial_multialgebra({parse_monad("powerset"), e}, 2);
  EXPECT_TRUE(rep2.ok) << rep2.failure;
  // P̄(E) + E with |E| = 1: {∅} and the error.
  EXPECT_EQ(rep2.carrier_size, 2u);
}

TEST(FreeMultialgebra, StructureIsAnAlgebraForEachMonad) {
  auto m = parse_monad("maybe");
  auto p = parse_monad("powerset");
  FreeMultialgebra free({p, m});
  auto r = run_chain(free.system(FinSet::range(1)));
  ASSERT_TRUE(r.converged());
  FinSet c = free.carrier(*r.solution, FinSet::range(1));
  auto alg = free.as_multialgebra(c);
  for (const auto& a : alg.algebras) EXPECT_FALSE(check_em(a).has_value()) << a.monad->name();
  for (const auto& x : c) EXPECT_LE(free.depth(x), r.solution->converged_at);
  EXPECT_EQ(free.variables(free.unit(n(0))), std::vector<Label>{n(0)});
}

TEST(FreeMultialgebra, NeedsTwoMonads) { EXPECT_THROW(FreeMultialgebra({parse_monad("maybe")}), Error); }
