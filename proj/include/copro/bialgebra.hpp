#pragma once

// Eilenberg-Moore algebras, multialgebras, and the free multialgebra solved
// from the family system X_p = S̄_p(Σ_{q≠p} X_q + A).

#include <copro/chain.hpp>
#include <copro/monad.hpp>

#include <unordered_map>

namespace copro {

struct EMAlgebra {
  MonadPtr monad;
  FinSet carrier;
  /// S(carrier) -> carrier.
  FinMap structure;

  Label operator()(const Label& v) const { return structure(v); }
};

inline std::optional<std::string> check_em(const EMAlgebra& a, std::uint64_t cap = kDefaultCap) {
  return em_violation(*a.monad, a.carrier, a.structure, cap);
}

/// The algebra moved along a bijection i : carrier -> Y.
inline EMAlgebra transport(const EMAlgebra& a, const FinMap& i) {
  if (!is_bijective(i)) fail(Errc::NotBijective, "transport along a non-bijective map");
  FinMap inv = inverse(i);
  FinSet sy = a.monad->carrier(i.cod());
  std::vector<Label> imgs;
  for (const auto& v : sy) imgs.push_back(i(a.structure(a.monad->map(inv, v))));
  EMAlgebra out{a.monad, i.cod(), FinMap::table(sy, i.cod(), std::move(imgs))};
  if (auto bad = check_em(out)) fail(Errc::InvalidAlgebra, "transported algebra: " + *bad);
  return out;
}

struct FreeAlgebra {
  EMAlgebra algebra;
  /// η_A : A -> SA.
  FinMap unit;
};

inline FreeAlgebra free_algebra(const MonadPtr& s, const FinSet& a) {
  require(s->finite_valued(), "free_algebra needs a finite-valued monad");
  FinSet sa = s->carrier(a);
  FinSet ssa = s->carrier(sa);
  std::vector<Label> imgs;
  for (const auto& w : ssa) imgs.push_back(s->mult(w));
  std::vector<Label> units;
  for (const auto& x : a) units.push_back(s->unit(x));
  return {EMAlgebra{s, sa, FinMap::table(ssa, sa, std::move(imgs))}, FinMap::table(a, sa, std::move(units))};
}

/// Every EM structure on the carrier, in for_each_map order of the
/// non-unit positions. Fails with BudgetExceeded above `bound` candidates.
inline std::vector<EMAlgebra> enumerate_em_algebras(const MonadPtr& s, const FinSet& r, std::uint64_t bound = 1'000'000) {
  FinSet sr = s->carrier(r);
  std::vector<Label> free_pos;
  std::unordered_map<Label, Label, LabelHash> forced;
  for (const auto& x : r) forced.emplace(s->unit(x), x);
  for (const auto& v : sr)
    if (!forced.contains(v)) free_pos.push_back(v);
  FinSet free_set = FinSet::from_sorted(free_pos);
  std::vector<EMAlgebra> out;
  if (free_set.empty() || !r.empty()) {
    FinSet ssr = s->carrier(sr);
    for_each_map(free_set, r, [&](const FinMap& choice) {
      std::vector<Label> imgs;
      for (const auto& v : sr) {
        auto it = forced.find(v);
        imgs.push_back(it != forced.end() ? it->second : choice(v));
      }
      FinMap alg = FinMap::table(sr, r, std::move(imgs));
      for (const auto& w : ssr)
        if (alg(s->mult(w)) != alg(s->map(alg, w))) return true;
      out.push_back(EMAlgebra{s, r, alg});
      return true;
    }, bound);
  }
  return out;
}

/// One carrier with an EM structure for each monad of a family.
struct Multialgebra {
  FinSet carrier;
  std::vector<EMAlgebra> algebras;
};
using Bialgebra = Multialgebra;

/// Every multialgebra for the family on {0..k-1}, k ≤ max_size.
inline std::vector<Multialgebra> enumerate_multialgebras(const std::vector<MonadPtr>& monads, std::size_t max_size,
                                                         std::uint64_t bound = 1'000'000) {
  std::vector<Multialgebra> out;
  for (std::size_t k = 0; k <= max_size; ++k) {
    FinSet r = FinSet::range(k);
    std::vector<std::vector<EMAlgebra>> per;
    for (const auto& m : monads) per.push_back(enumerate_em_algebras(m, r, bound));
    std::vector<std::size_t> idx(monads.size(), 0);
    bool empty = std::any_of(per.begin(), per.end(), [](auto& v) { return v.empty(); });
    if (empty) continue;
    while (true) {
      Multialgebra b{r, {}};
      for (std::size_t p = 0; p < monads.size(); ++p) b.algebras.push_back(per[p][idx[p]]);
      out.push_back(std::move(b));
      std::size_t j = monads.size();
      while (j > 0 && ++idx[j - 1] == per[j - 1].size()) idx[--j] = 0;
      if (j == 0) break;
    }
  }
  return out;
}

/// g : B1 -> B2 commutes with every structure map.
inline bool is_multialgebra_morphism(const Multialgebra& b1, const Multialgebra& b2, const FinMap& g) {
  for (std::size_t p = 0; p < b1.algebras.size(); ++p) {
    const auto& m = *b1.algebras[p].monad;
    for (const auto& v : b1.algebras[p].structure.dom())
      if (g(b1.algebras[p](v)) != b2.algebras[p](m.map(g, v))) return false;
  }
  return true;
}

/// The point A -> B an exception algebra with error set A amounts to.
inline FinMap trialgebra_point(const EMAlgebra& exception_algebra, const FinSet& a) {
  std::vector<Label> imgs;
  for (const auto& x : a) imgs.push_back(exception_algebra(Label::inj(1, x)));
  return FinMap::table(a, exception_algebra.carrier, std::move(imgs));
}

/// The free multialgebra of a family of consistent monads, element by
/// element. Elements are in_p(s) with s a non-unit S_p-element over the
/// elements not tagged p, and in_n(a) for a in the base (n = family size).
/// Base elements are absent for the initial multialgebra.
class FreeMultialgebra {
 public:
  explicit FreeMultialgebra(std::vector<MonadPtr> monads) : monads_(std::move(monads)) {
    require(monads_.size() >= 2, "a family needs at least two monads");
  }

  const std::vector<MonadPtr>& monads() const { return monads_; }
  std::size_t size() const { return monads_.size(); }
  std::int64_t base_tag() const { return static_cast<std::int64_t>(monads_.size()); }

  /// X_p = S̄_p(Σ_{q≠p} X_q [+ A]).
  EquationSystem system(const std::optional<FinSet>& base) const {
    EquationSystem sys;
    for (std::size_t p = 0; p < size(); ++p) {
      sys.sorts.push_back("X" + std::to_string(p));
      std::vector<std::pair<std::int64_t, Expr>> terms;
      for (std::size_t q = 0; q < size(); ++q)
        if (q != p) terms.emplace_back(static_cast<std::int64_t>(q), Expr::sort(q));
      if (base) terms.emplace_back(base_tag(), Expr::constant(*base));
      sys.rhs.push_back(Expr::bar(monads_[p], Expr::tagged_sum(std::move(terms))));
    }
    return sys;
  }

  /// Σ_p in_p(X_p) [+ in_n(A)] from a solved system.
  FinSet carrier(const SolutionPair& sol, const std::optional<FinSet>& base) const {
    std::vector<Label> out;
    for (std::size_t p = 0; p < size(); ++p)
      for (const auto& x : sol.carriers[p]) out.push_back(Label::inj(static_cast<std::int64_t>(p), x));
    if (base)
      for (const auto& a : *base) out.push_back(Label::inj(base_tag(), a));
    return FinSet::from_sorted(std::move(out));
  }

  Label unit(const Label& a) const { return Label::inj(base_tag(), a); }

  /// The S_p-structure: S_p(C) ≅ S_p(S_p U + ...) -> S_p U ≅ X_p + U, where U
  /// is everything not tagged p.
  Label structure(std::size_t p, const Label& v) const {
    const MonadSpec& s = *monads_[p];
    const auto tag = static_cast<std::int64_t>(p);
    Label w = apply_fn(s, [&](const Label& c) { return c.tag() == tag ? c.inner() : s.unit(c); }, v);
    Label t = s.mult(w);
    if (auto u = s.unit_preimage(t)) return *u;
    return Label::inj(tag, t);
  }

  /// in_p(S_p(in) s) for s over an outside set whose elements are already
  /// elements of this algebra.
  Label layer(std::size_t p, const Label& s) const {
    const MonadSpec& m = *monads_[p];
    if (auto u = m.unit_preimage(s)) return *u;
    return Label::inj(static_cast<std::int64_t>(p), s);
  }

  /// Base elements an element mentions.
  std::vector<Label> variables(const Label& x) const {
    std::vector<Label> out;
    collect_variables(x, out);
    return detail::sorted_unique(std::move(out));
  }

  /// Number of nested layers.
  std::size_t depth(const Label& x) const {
    if (x.tag() == base_tag()) return 0;
    std::size_t d = 0;
    for (const auto& c : monads_[static_cast<std::size_t>(x.tag())]->occurring(x.inner())) d = std::max(d, depth(c));
    return d + 1;
  }

  /// The unique multialgebra morphism out of the free one determined by
  /// target structures (one per monad, element-wise on S_p(B)) and h on the
  /// base. Memoized; elements are DAG-shared so this stays linear.
  class Extension {
   public:
    using Structure = std::function<Label(std::size_t, const Label&)>;
    Extension(const FreeMultialgebra& free, Structure target, FinMap::Fn h)
        : free_(free), target_(std::move(target)), h_(std::move(h)) {}

    Label operator()(const Label& x) const {
      if (auto it = memo_.find(x); it != memo_.end()) return it->second;
      Label out;
      if (x.tag() == free_.base_tag()) {
        out = h_(x.inner());
      } else {
        auto p = static_cast<std::size_t>(x.tag());
        const MonadSpec& s = *free_.monads_[p];
        out = target_(p, apply_fn(s, [this](const Label& c) { return (*this)(c); }, x.inner()));
      }
      memo_.emplace(x, out);
      return out;
    }

   private:
    const FreeMultialgebra& free_;
    Structure target_;
    FinMap::Fn h_;
    mutable std::unordered_map<Label, Label, LabelHash> memo_;
  };

  Extension extend(Extension::Structure target, FinMap::Fn h) const {
    return Extension(*this, std::move(target), std::move(h));
  }

  /// Extension into a materialized multialgebra.
  Extension extend(const Multialgebra& b, FinMap::Fn h) const {
    const Multialgebra* bp = &b;
    return extend([bp](std::size_t p, const Label& v) { return bp->algebras[p](v); }, std::move(h));
  }

  /// The free structure itself as a Multialgebra on a materialized carrier.
  Multialgebra as_multialgebra(const FinSet& carrier, std::uint64_t cap = kDefaultCap) const {
    Multialgebra out{carrier, {}};
    for (std::size_t p = 0; p < size(); ++p) {
      FinSet sc = monads_[p]->carrier(carrier, cap);
      std::vector<Label> imgs;
      for (const auto& v : sc) imgs.push_back(structure(p, v));
      out.algebras.push_back(EMAlgebra{monads_[p], carrier, FinMap::table(sc, carrier, std::move(imgs))});
    }
    return out;
  }

  /// The G-algebra the chain recursion expects for a target multialgebra and
  /// base map: φ_p = σ_p ∘ S_p([id, ..., id, h]).
  GAlgebra g_algebra(const Multialgebra& b, const FinMap::Fn& h) const {
    GAlgebra g;
    for (std::size_t p = 0; p < size(); ++p) {
      g.carriers.push_back(b.carrier);
      const Multialgebra* bp = &b;
      const MonadSpec* s = monads_[p].get();
      std::int64_t base = base_tag();
      g.structure.push_back([bp, s, p, h, base](const Label& v) {
        return bp->algebras[p](apply_fn(*s, [&](const Label& c) { return c.tag() == base ? h(c.inner()) : c.inner(); }, v));
      });
    }
    return g;
  }

 private:
  void collect_variables(const Label& x, std::vector<Label>& out) const {
    if (x.tag() == base_tag()) {
      out.push_back(x.inner());
      return;
    }
    for (const auto& c : monads_[static_cast<std::size_t>(x.tag())]->occurring(x.inner())) collect_variables(c, out);
  }

  std::vector<MonadPtr> monads_;
};

struct InitialReport {
  bool ok = true;
  std::size_t carrier_size = 0;
  std::size_t targets = 0;
  std::string failure;
};

/// Checks that the solved initial multialgebra (no base) has exactly one
/// morphism into every multialgebra on at most `probe_bound` elements, and
/// that it is the one the recursion computes.
inline InitialReport verify_initial_multialgebra(const std::vector<MonadPtr>& monads, std::size_t probe_bound,
                                                 const ChainOptions& opt = {}) {
  FreeMultialgebra free(monads);
  ChainResult res = run_chain(free.system(std::nullopt), opt);
  if (!res.converged()) fail(Errc::NoConvergence, res.reason);
  InitialReport rep;
  FinSet carrier = free.carrier(*res.solution, std::nullopt);
  Multialgebra init = free.as_multialgebra(carrier);
  rep.carrier_size = carrier.size();
  FinMap::Fn no_base = [](const Label& x) -> Label { fail(Errc::ContractViolation, "no base element " + x.str()); };
  for (const auto& b : enumerate_multialgebras(monads, probe_bound)) {
    ++rep.targets;
    auto ext = free.extend(b, no_base);
    FinMap rec(carrier, b.carrier, [&](const Label& x) { return ext(x); });
    auto parts = recurse(res, free.g_algebra(b, no_base));
    std::size_t count = 0;
    bool matches = false;
    for_each_map(carrier, b.carrier, [&](const FinMap& g) {
      if (is_multialgebra_morphism(init, b, g)) {
        ++count;
        matches = same_on_domain(g, rec.tabulated());
      }
      return true;
    });
    for (const auto& x : carrier) {
      auto p = static_cast<std::size_t>(x.tag());
      if (parts[p](x.inner()) != rec(x)) matches = false;
    }
    if (count != 1 || !matches) {
      rep.ok = false;
      rep.failure = "target of size " + std::to_string(b.carrier.size()) + " admits " + std::to_string(count) +
                    " morphisms" + (matches ? "" : " and the recursion disagrees");
      return rep;
    }
  }
  return rep;
}

}  // namespace copro
