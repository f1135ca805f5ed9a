#include <copro/coproduct.hpp>

#include <gtest/gtest.h>

using namespace copro;

namespace {

Label n(int i) { return Label::num(i); }
Label err() { return Label::inj(1, Label::sym("err")); }

MonadPtr M(const std::string& s) { return parse_monad(s); }

/// maybe -> exception:2 sending the error to e0.
MonadMorphism maybe_into_exception2() {
  return {M("maybe"), M("exception:2"), [](const Label& x) {
            return x.tag() == 1 ? Label::inj(1, Label::sym("e0")) : x;
          }};
}

}  // namespace

TEST(Build, MaybeMaybeSizes) {
  // Oracle: maybe(A + 1) = A + 2.
  for (std::size_t k = 0; k <= 3; ++k) {
    auto r = build(M("maybe"), M("maybe"), FinSet::range(k));
    ASSERT_TRUE(r.converged());
    EXPECT_EQ(r.carrier->size(), k + 2) << k;
  }
}

TEST(Build, PowersetException) {
  auto r = build(M("powerset"), M("exception:1"), FinSet::range(1));
  EXPECT_EQ(r.carrier->size(), 4u);
}

TEST(Build, PowersetPowersetDoesNotConverge) {
  try {
    build(M("powerset"), M("powerset"), FinSet::range(1), BuildOptions{8, kDefaultCap});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoConvergence);
  }
  CoproductMonad c({M("powerset"), M("powerset")}, BuildOptions{8, kDefaultCap});
  EXPECT_TRUE(c.card(1).saturated);
  EXPECT_THROW(c.carrier(FinSet::range(1)), Error);
}

TEST(Build, FamilyOfThreeMaybes) {
  auto m = M("maybe");
  auto r = family_build({m, m, m}, FinSet::range(1));
  EXPECT_EQ(r.carrier->size(), 4u);
  // A family of two is the binary build.
  EXPECT_EQ(family_build({m, M("powerset")}, FinSet::range(1)).carrier, build(m, M("powerset"), FinSet::range(1)).carrier);
  EXPECT_THROW(family_build({m, M("powerset"), M("powerset")}, FinSet::range(1), BuildOptions{6, 1u << 14}), Error);
}

TEST(Build, RejectsInconsistentSummand) {
  try {
    CoproductMonad c({M("terminal"), M("maybe")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InconsistentMonad);
  }
}

TEST(CoproductMonad, UnitIsBaseInclusion) {
  CoproductMonad c({M("maybe"), M("maybe")});
  EXPECT_EQ(c.unit(n(0)), Label::inj(2, n(0)));
  EXPECT_EQ(c.unit_preimage(c.unit(n(0))), n(0));
  FinSet ca = c.carrier(FinSet::range(1));
  EXPECT_TRUE(ca.contains(c.unit(n(0))));
}

TEST(CoproductMonad, MultExamples) {
  CoproductMonad c({M("maybe"), M("maybe")});
  FinSet a = FinSet::range(1);
  FinSet ca = c.carrier(a);
  for (const auto& x : ca) EXPECT_EQ(c.mult(c.unit(x)), x);
  // An outer left error layer is the left error.
  Label outer = c.embed(0, err());
  EXPECT_EQ(c.mult(outer), c.embed(0, err()));
  // Left error over inner terms is still the left error.
  Label nested = c.structure(0, Label::inj(0, c.unit(c.embed(1, err()))));
  EXPECT_EQ(c.mult(nested), c.embed(1, err()));
}

TEST(CoproductMonad, PowersetUnionFlattensThroughOracle) {
  auto p = M("powerset");
  auto e = M("exception:1");
  CoproductMonad c({p, e});
  auto orc = exception_bialgebra_oracle(p, FinSet::symbols("e", 1));
  FinSet a = FinSet::range(1);
  auto rep = canonical_compare(c, orc, a);
  ASSERT_TRUE(rep.ok()) << rep.mismatch;
  // Outer P-layer over {η(a), err}: the oracle's union.
  Label raise = c.embed(1, Label::inj(1, Label::sym("e0")));
  Label inner = c.structure(0, Label::set({c.unit(n(0)), raise}));
  Label outer = c.embed(0, Label::set({inner, raise}));
  Label lhs = (*rep.morphism)(c.mult(outer));
  EXPECT_EQ(lhs, Label::set({Label::inj(0, n(0)), Label::inj(1, Label::sym("e0"))}));
}

TEST(CoproductMonad, LawsOnConvergedCoproducts) {
  for (auto [s, t] : {std::pair{"maybe", "maybe"}, std::pair{"powerset", "exception:1"}, std::pair{"exception:1", "reader:2"}}) {
    CoproductMonad c({M(s), M(t)});
    auto rep = check_laws(c);
    EXPECT_TRUE(rep.ok()) << c.name();
    for (const auto& r : rep.results) {
      EXPECT_TRUE(r.passed) << c.name() << " " << r.law << " " << r.witness;
      EXPECT_TRUE(r.exhaustive || r.checked >= 100) << c.name() << " " << r.law << " " << r.checked;
    }
  }
}

TEST(CoproductMonad, ActionOnInjectionsIsInjective) {
  CoproductMonad c({M("powerset"), M("exception:1")});
  for_each_injection(FinSet::range(1), FinSet::range(2), [&](const FinMap& m) {
    FinMap cm = c.action(m);
    EXPECT_TRUE(is_injective(cm));
    return true;
  });
}

TEST(ExceptionOracle, Sizes) {
  EXPECT_EQ(exception_oracle(M("maybe"), FinSet::symbols("e", 1))->carrier(FinSet::range(2)).size(), 4u);
  EXPECT_EQ(exception_oracle(M("powerset"), FinSet::symbols("e", 1))->carrier(FinSet::range(1)).size(), 4u);
  EXPECT_EQ(exception_oracle(M("terminal"), FinSet::symbols("e", 2))->carrier(FinSet::range(2)).size(), 1u);
}

TEST(ExceptionOracle, PassesLaws) {
  for (auto t : {"maybe", "powerset", "reader:2"}) {
    auto rep = check_laws(*exception_oracle(M(t), FinSet::symbols("e", 2)));
    EXPECT_TRUE(rep.ok()) << t;
  }
}

TEST(CanonicalCompare, AgreesWithExceptionOracle) {
  for (auto t : {"maybe", "powerset", "reader:2"})
    for (std::size_t ne = 1; ne <= 2; ++ne)
      for (std::size_t na = 0; na <= 2; ++na) {
        FinSet errors = FinSet::symbols("e", ne);
        auto exc = std::make_shared<ExceptionMonad>("exception", errors, false);
        CoproductMonad c({M(t), exc});
        auto rep = canonical_compare(c, exception_bialgebra_oracle(M(t), errors), FinSet::range(na));
        EXPECT_TRUE(rep.ok()) << t << " |E|=" << ne << " |A|=" << na << ": " << rep.mismatch;
        EXPECT_GT(rep.mult_checked, 0u);
      }
}

TEST(CanonicalCompare, WrongOracleIsReported) {
  // T(X) + E instead of T(X + E): powerset at |X| = 1 has 3, not 4.
  CoproductMonad c({M("powerset"), M("exception:1")});
  auto wrong = std::make_shared<ExceptionMonad>("exception", FinSet::symbols("e", 1), false);
  BialgebraOracle orc{wrong, {[](const Label& v) { return v; }, [](const Label& v) { return v; }}};
  auto rep = canonical_compare(c, orc, FinSet::range(1));
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.sizes_match);
  EXPECT_FALSE(rep.mismatch.empty());
}

TEST(Embeddings, InjectiveMonadMorphisms) {
  for (auto [s, t] : {std::pair{"maybe", "maybe"}, std::pair{"powerset", "exception:1"}, std::pair{"reader:2", "exception:2"}}) {
    CoproductMonad c({M(s), M(t)});
    auto rep = check_embeddings(c, default_probes(2));
    EXPECT_TRUE(rep.ok()) << c.name() << ": " << rep.failure;
    EXPECT_GT(rep.checked, 0u);
  }
}

TEST(Embeddings, MaybeMaybeSendsErrorToLeftLayer) {
  CoproductMonad c({M("maybe"), M("maybe")});
  EXPECT_EQ(c.embed(0, err()), Label::inj(0, err()));
  EXPECT_EQ(c.embed(1, err()), Label::inj(1, err()));
  EXPECT_EQ(c.embed(0, Label::inj(0, n(0))), c.unit(n(0)));
}

TEST(SpecialCases, TerminalAbsorbs) {
  for (auto t : {"exception:1", "maybe", "powerset", "reader:2", "state:2", "terminal", "terminal0", "exception0:1"}) {
    auto c = make_coproduct({M("terminal"), M(t)});
    for (std::size_t k = 0; k <= 3; ++k) EXPECT_EQ(c->carrier(FinSet::range(k)).size(), 1u) << t;
  }
}

TEST(SpecialCases, TerminalZeroAtEmptySet) {
  // ∅ carries a multialgebra exactly when every summand is empty at ∅.
  EXPECT_EQ(make_coproduct({M("terminal0"), M("terminal0")})->card(0).value, 0u);
  EXPECT_EQ(make_coproduct({M("terminal0"), M("exception0:1")})->card(0).value, 0u);
  EXPECT_EQ(make_coproduct({M("terminal0"), M("maybe")})->card(0).value, 1u);
  EXPECT_EQ(make_coproduct({M("terminal0"), M("powerset")})->card(0).value, 1u);
  EXPECT_EQ(make_coproduct({M("terminal0"), M("reader:2")})->card(0).value, 0u);
  for (std::size_t k = 1; k <= 2; ++k) EXPECT_EQ(make_coproduct({M("terminal0"), M("maybe")})->card(k).value, 1u);
}

TEST(SpecialCases, ExceptionWithException) {
  auto two = M("exception:2");
  auto one = M("exception:1");
  auto sc = special_cases(two, one);
  ASSERT_TRUE(sc.has_value());
  for (std::size_t k = 0; k <= 3; ++k) {
    EXPECT_EQ((*sc)->card(k).value, k + 3);
    EXPECT_EQ(build(two, one, FinSet::range(k)).carrier->size(), k + 3);
  }
  EXPECT_FALSE(special_cases(M("maybe"), M("powerset")).has_value() &&
               std::dynamic_pointer_cast<const ExceptionMonad>(M("powerset")) == nullptr &&
               std::dynamic_pointer_cast<const ExceptionMonad>(M("maybe")) == nullptr);
}

TEST(SpecialCases, ExceptionZeroAgreesWithChain) {
  for (auto t : {"maybe", "powerset", "reader:2", "exception0:1"}) {
    auto sc = special_cases(M("exception0:1"), M(t));
    ASSERT_TRUE(sc.has_value()) << t;
    for (std::size_t k = 0; k <= 2; ++k)
      EXPECT_EQ((*sc)->card(k).value, build(M("exception0:1"), M(t), FinSet::range(k)).carrier->size()) << t << " " << k;
  }
}

TEST(Transfer, MaybeIntoExceptionTwo) {
  auto parts = std::vector<MonadMorphism>{maybe_into_exception2(), maybe_into_exception2()};
  CoproductMonad from({M("maybe"), M("maybe")});
  CoproductMonad to({M("exception:2"), M("exception:2")});
  for (std::size_t k = 0; k <= 2; ++k) {
    FinMap g = injective_morphism_transfer(parts, from, to, FinSet::range(k));
    EXPECT_TRUE(is_injective(g));
    EXPECT_EQ(g.dom().size(), k + 2);
    EXPECT_EQ(g.cod().size(), k + 4);
  }
}

TEST(Transfer, IdentityAndCollapsing) {
  auto m = M("maybe");
  MonadMorphism id{m, m, [](const Label& x) { return x; }};
  CoproductMonad c({m, m});
  FinMap g = injective_morphism_transfer({id, id}, c, c, FinSet::range(1));
  for (const auto& x : g.dom()) EXPECT_EQ(g(x), x);
  auto e2 = M("exception:2");
  MonadMorphism collapse{e2, m, [](const Label& x) { return x.tag() == 1 ? err() : x; }};
  CoproductMonad c2({e2, e2});
  try {
    injective_morphism_transfer({collapse, collapse}, c2, c, FinSet::range(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotInjective);
  }
}

TEST(UniversalProperty, MaybeMaybeAndPowersetMaybe) {
  for (auto [s, t] : {std::pair{"maybe", "maybe"}, std::pair{"powerset", "maybe"}}) {
    CoproductMonad c({M(s), M(t)});
    auto rep = verify_universal_property(c, FinSet::range(1), 3);
    EXPECT_TRUE(rep.ok) << c.name() << ": " << rep.failure;
    EXPECT_GT(rep.targets, 0u);
  }
}
