#include <copro/bialgebra.hpp>
#include <copro/chain.hpp>

#include <gtest/gtest.h>

using namespace copro;

namespace {

/// X = S̄(Y + A), Y = T̄(X + A).
EquationSystem two_sorted(const MonadPtr& s, const MonadPtr& t, const FinSet& a) {
  return FreeMultialgebra({s, t}).system(a);
}

}  // namespace

TEST(Chain, MaybeMaybeConverges) {
  auto m = parse_monad("maybe");
  auto r = run_chain(two_sorted(m, m, FinSet::range(1)));
  ASSERT_TRUE(r.converged());
  EXPECT_EQ(r.solution->carriers[0].size(), 1u);
  EXPECT_EQ(r.solution->carriers[1].size(), 1u);
  EXPECT_LE(r.solution->converged_at, 2u);
  for (const auto& h : r.solution->structure) EXPECT_TRUE(is_bijective(h));
}

TEST(Chain, PowersetPowersetDiverges) {
  auto p = parse_monad("powerset");
  auto r = run_chain(two_sorted(p, p, FinSet::range(1)), ChainOptions{8, kDefaultCap});
  EXPECT_FALSE(r.converged());
  EXPECT_FALSE(r.reason.empty());
  auto trace = r.trace();
  ASSERT_EQ(trace.size(), 10u);
  // Oracle: x_{i+1} = 2^(y_i + 1) - (y_i + 1), symmetric in the two sorts.
  Count x = Count::of(0);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    Count arg = x + Count::of(1);
    x = Count::pow(Count::of(2), arg) - arg;
    EXPECT_EQ(trace[i][0].saturated, x.saturated) << i;
    if (!x.saturated) {
      EXPECT_EQ(trace[i][0].value, x.value) << i;
    }
    EXPECT_EQ(trace[i][1].value, trace[i][0].value);
  }
  for (std::size_t i = 1; i + 1 < trace.size(); ++i)
    if (!trace[i + 1][0].saturated) {
      EXPECT_LT(trace[i][0].value, trace[i + 1][0].value);
    }
}

TEST(Chain, PowersetExceptionConverges) {
  auto p = parse_monad("powerset");
  auto e = parse_monad("exception:1");
  auto r = run_chain(two_sorted(p, e, FinSet::range(1)));
  ASSERT_TRUE(r.converged());
  // T-sort is the constant E; X = P̄(E + A) = 2^2 - 2.
  EXPECT_EQ(r.solution->carriers[1].size(), 1u);
  EXPECT_EQ(r.solution->carriers[0].size(), 2u);
}

TEST(Chain, SizesAreMonotoneAndConnectorsInjective) {
  for (auto [s, t] : {std::pair{"maybe", "powerset"}, std::pair{"reader:2", "exception:1"}, std::pair{"state:2", "maybe"}}) {
    auto r = run_chain(two_sorted(parse_monad(s), parse_monad(t), FinSet::range(1)), ChainOptions{4, 1u << 14});
    for (std::size_t i = 0; i < r.chain.connectors.size(); ++i)
      for (std::size_t p = 0; p < 2; ++p) {
        EXPECT_TRUE(is_injective(r.chain.connectors[i][p]));
        EXPECT_LE(r.trace()[i][p].value, r.trace()[i + 1][p].value);
      }
  }
}

TEST(Chain, ConstantSystem) {
  EquationSystem sys{{"X"}, {Expr::constant(FinSet::range(3))}};
  auto r = run_chain(sys);
  ASSERT_TRUE(r.converged());
  EXPECT_EQ(r.solution->converged_at, 1u);
  EXPECT_EQ(r.solution->carriers[0].size(), 3u);
}

TEST(Chain, SumOfSortsOnlyReachesFixpointAtZero) {
  // X = X + Y, Y = ∅: the initial solution is empty and the chain stops at once.
  EquationSystem sys{{"X", "Y"}, {Expr::tagged_sum({{0, Expr::sort(0)}, {1, Expr::sort(1)}}), Expr::constant(FinSet{})}};
  auto r = run_chain(sys);
  ASSERT_TRUE(r.converged());
  EXPECT_EQ(r.solution->converged_at, 0u);
}

TEST(Chain, BudgetMustBePositive) { EXPECT_THROW(run_chain(EquationSystem{}, ChainOptions{0, 16}), Error); }

TEST(Chain, EvenStagesMatchComposite) {
  // Two-sort X = S̄Y, Y = T̄X against the one-sort chain Z = S̄T̄Z.
  for (auto [s, t] : {std::pair{"powerset", "exception:1"}, std::pair{"maybe", "maybe"}}) {
    auto S = parse_monad(s), T = parse_monad(t);
    EquationSystem two{{"X", "Y"}, {Expr::bar(S, Expr::sort(1)), Expr::bar(T, Expr::sort(0))}};
    EquationSystem one{{"Z"}, {Expr::bar(S, Expr::bar(T, Expr::sort(0)))}};
    auto r2 = run_chain(two, ChainOptions{8, 1u << 14});
    auto r1 = run_chain(one, ChainOptions{4, 1u << 14});
    for (std::size_t k = 0; k < r1.chain.stages.size() && 2 * k < r2.chain.stages.size(); ++k)
      EXPECT_EQ(r2.chain.carriers(2 * k)[0], r1.chain.carriers(k)[0]) << s << "+" << t << " at " << k;
  }
}

TEST(Recurse, IntoTerminalAlgebraIsConstant) {
  auto m = parse_monad("maybe");
  FreeMultialgebra free({m, m});
  auto r = run_chain(free.system(FinSet::range(1)));
  ASSERT_TRUE(r.converged());
  auto b = enumerate_multialgebras({m, m}, 1);
  ASSERT_FALSE(b.empty());
  const Multialgebra* one = nullptr;
  for (const auto& x : b)
    if (x.carrier.size() == 1) one = &x;
  ASSERT_NE(one, nullptr);
  auto g = free.g_algebra(*one, [](const Label&) { return Label::num(0); });
  auto f = recurse(r, g);
  for (const auto& fp : f)
    for (const auto& x : fp.dom()) EXPECT_EQ(fp(x), Label::num(0));
  EXPECT_TRUE(is_hg_morphism(r.chain.system, *r.solution, g, f));
}

TEST(Recurse, UniqueAmongAllMapsForMaybeMaybe) {
  // For every bialgebra B with |B| ≤ 3 and every point a ↦ b: brute force over
  // pairs of maps S* -> B, T* -> B finds exactly the recursion's answer.
  auto m = parse_monad("maybe");
  FreeMultialgebra free({m, m});
  auto r = run_chain(free.system(FinSet::range(1)));
  ASSERT_TRUE(r.converged());
  const auto& sol = *r.solution;
  for (const auto& b : enumerate_multialgebras({m, m}, 3)) {
    for (const auto& pt : b.carrier) {
      auto g = free.g_algebra(b, [pt](const Label&) { return pt; });
      auto f = recurse(r, g);
      // The layer elements go to where each algebra sends its error.
      Label err = Label::inj(1, Label::sym("err"));
      EXPECT_EQ(f[0](sol.carriers[0][0]), b.algebras[0](err));
      EXPECT_EQ(f[1](sol.carriers[1][0]), b.algebras[1](err));
      std::size_t count = 0;
      for_each_map(sol.carriers[0], b.carrier, [&](const FinMap& f0) {
        for_each_map(sol.carriers[1], b.carrier, [&](const FinMap& f1) {
          if (is_hg_morphism(r.chain.system, sol, g, {f0, f1})) {
            ++count;
            EXPECT_TRUE(same_on_domain(f0, f[0]) && same_on_domain(f1, f[1]));
          }
          return true;
        });
        return true;
      });
      EXPECT_EQ(count, 1u);
    }
  }
}

TEST(Cocone, IntoSolutionGivesConnectors) {
  auto p = parse_monad("powerset");
  auto e = parse_monad("exception:1");
  FreeMultialgebra free({p, e});
  auto r = run_chain(free.system(FinSet::range(1)));
  ASSERT_TRUE(r.converged());
  const auto& sol = *r.solution;
  // The solution as a G-algebra: φ_p = structure_p on the barred part.
  GAlgebra self;
  for (std::size_t q = 0; q < 2; ++q) {
    self.carriers.push_back(sol.carriers[q]);
    FinMap st = sol.structure[q];
    self.structure.push_back([st](const Label& x) { return st(x); });
  }
  auto cocone = canonical_cocone(r.chain, self, sol.converged_at);
  for (std::size_t q = 0; q < 2; ++q)
    for (const auto& x : sol.carriers[q]) EXPECT_EQ(cocone.back()[q](x), x);
}
