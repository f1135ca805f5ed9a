#pragma once

// Coproducts of monads: (⊕_p S_p)A = Σ_p S*_p A + A with the free multialgebra
// structure, embeddings, the exception oracle T(- + E), comparison against
// oracles, the inconsistent special cases, and transfer of injective monad
// morphisms.

#include <copro/bialgebra.hpp>
#include <copro/chain.hpp>
#include <copro/complement.hpp>
#include <copro/monad.hpp>

#include <map>
#include <mutex>

namespace copro {

struct BuildOptions {
  std::size_t budget = 16;
  std::uint64_t cap = kDefaultCap;
};

struct BuildResult {
  FinSet base;
  ChainResult chain;
  std::optional<FinSet> carrier;

  bool converged() const { return carrier.has_value(); }
  /// Per-sort sizes at the convergence stage.
  std::vector<std::size_t> sort_sizes() const {
    std::vector<std::size_t> out;
    if (chain.solution)
      for (const auto& c : chain.solution->carriers) out.push_back(c.size());
    return out;
  }
};

/// The coproduct of a family of consistent monads. Unit, multiplication and
/// the functor action work element by element on any set; carriers come from
/// the initial chain and exist only where it converges within budget.
class CoproductMonad final : public MonadSpec {
 public:
  CoproductMonad(std::vector<MonadPtr> monads, BuildOptions opt = {}) : free_(std::move(monads)), opt_(opt) {
    for (const auto& m : free_.monads())
      if (classify_consistency(*m) != Consistency::Consistent)
        fail(Errc::InconsistentMonad, m->name() + " is inconsistent; use make_coproduct");
  }

  std::string name() const override {
    std::string out;
    for (const auto& m : free_.monads()) out += (out.empty() ? "" : "(+)") + m->name();
    return out;
  }

  const FreeMultialgebra& free() const { return free_; }
  const std::vector<MonadPtr>& summands() const { return free_.monads(); }
  const BuildOptions& options() const { return opt_; }
  std::int64_t base_tag() const { return free_.base_tag(); }

  /// Runs (or recalls) the chain at A.
  const BuildResult& build_at(const FinSet& a) const {
    {
      std::lock_guard lock(mutex_);
      if (auto it = builds_.find(a); it != builds_.end()) return *it->second;
    }
    auto r = std::make_shared<BuildResult>();
    r->base = a;
    r->chain = run_chain(free_.system(a), ChainOptions{opt_.budget, opt_.cap});
    if (r->chain.converged()) r->carrier = free_.carrier(*r->chain.solution, a);
    std::lock_guard lock(mutex_);
    return *builds_.emplace(a, std::move(r)).first->second;
  }

  /// The carrier at A or NoConvergence with the size trace.
  FinSet carrier_or_throw(const FinSet& a) const {
    const BuildResult& r = build_at(a);
    if (!r.converged()) fail(Errc::NoConvergence, name() + " at a " + std::to_string(a.size()) + "-element set: " + r.chain.reason);
    return *r.carrier;
  }

  Count card(std::size_t n) const override {
    const BuildResult& r = build_at(FinSet::range(n));
    return r.converged() ? Count::of(r.carrier->size()) : Count::huge();
  }

  Label unit(const Label& x) const override { return free_.unit(x); }
  std::optional<Label> unit_preimage(const Label& t) const override {
    if (t.tag() == base_tag()) return t.inner();
    return std::nullopt;
  }
  std::vector<Label> occurring(const Label& t) const override { return free_.variables(t); }

  /// Extension of η ∘ f through the free structure.
  Label map(const FinMap& f, const Label& t) const override {
    const FreeMultialgebra* fr = &free_;
    auto ext = free_.extend([fr](std::size_t p, const Label& v) { return fr->structure(p, v); },
                            [fr, &f](const Label& a) { return fr->unit(f(a)); });
    return ext(t);
  }

  /// Extension of the identity of (⊕S)A through the free structure on it.
  Label mult(const Label& w) const override { return mult_extension()(w); }

  /// The multiplication as a reusable memoized extension.
  FreeMultialgebra::Extension mult_extension() const {
    const FreeMultialgebra* fr = &free_;
    return free_.extend([fr](std::size_t p, const Label& v) { return fr->structure(p, v); },
                        [](const Label& c) { return c; });
  }

  /// The S_p-algebra structure of the coproduct at any set.
  Label structure(std::size_t p, const Label& v) const { return free_.structure(p, v); }

  /// The embedding S_p -> ⊕S at an element: structure ∘ S_p(η).
  Label embed(std::size_t p, const Label& s) const {
    const FreeMultialgebra* fr = &free_;
    const MonadSpec& m = *free_.monads()[p];
    return free_.structure(p, apply_fn(m, [fr](const Label& a) { return fr->unit(a); }, s));
  }

  /// The converged multialgebra on (⊕S)A.
  Multialgebra multialgebra_at(const FinSet& a) const { return free_.as_multialgebra(carrier_or_throw(a), opt_.cap); }

 protected:
  FinSet make_carrier(const FinSet& x) const override { return carrier_or_throw(x); }

 private:
  FreeMultialgebra free_;
  BuildOptions opt_;
  mutable std::mutex mutex_;
  mutable std::map<FinSet, std::shared_ptr<const BuildResult>> builds_;
};

inline std::shared_ptr<const CoproductMonad> coproduct_monad(std::vector<MonadPtr> monads, BuildOptions opt = {}) {
  return std::make_shared<CoproductMonad>(std::move(monads), opt);
}

/// The carrier of (S⊕T)A; NoConvergence when the chain does not settle.
inline BuildResult build(const MonadPtr& s, const MonadPtr& t, const FinSet& a, const BuildOptions& opt = {}) {
  CoproductMonad c({s, t}, opt);
  BuildResult r = c.build_at(a);
  if (!r.converged()) fail(Errc::NoConvergence, c.name() + ": " + r.chain.reason);
  return r;
}

inline BuildResult family_build(const std::vector<MonadPtr>& monads, const FinSet& a, const BuildOptions& opt = {}) {
  CoproductMonad c(monads, opt);
  BuildResult r = c.build_at(a);
  if (!r.converged()) fail(Errc::NoConvergence, c.name() + ": " + r.chain.reason);
  return r;
}

// ------------------------------------------------------------ exception oracle

/// X ↦ T(X + E) with η = η^T ∘ inl and μ = μ^T ∘ T[id, η^T ∘ inr].
class ExceptionOracle final : public MonadSpec {
 public:
  ExceptionOracle(MonadPtr t, FinSet errors) : t_(std::move(t)), errors_(std::move(errors)) {
    require(t_->finite_valued(), "exception_oracle needs a finite-valued monad");
  }

  std::string name() const override { return t_->name() + "(-+" + std::to_string(errors_.size()) + ")"; }
  Count card(std::size_t n) const override { return t_->card(n + errors_.size()); }
  Label map(const FinMap& f, const Label& s) const override {
    return apply_fn(*t_, [&f](const Label& x) { return x.tag() == 0 ? Label::inj(0, f(x.inner())) : x; }, s);
  }
  Label unit(const Label& x) const override { return t_->unit(Label::inj(0, x)); }
  Label mult(const Label& w) const override {
    const MonadSpec& t = *t_;
    return t.mult(apply_fn(t, [&t](const Label& x) { return x.tag() == 0 ? x.inner() : t.unit(x); }, w));
  }
  std::optional<Label> unit_preimage(const Label& s) const override {
    auto u = t_->unit_preimage(s);
    if (u && u->tag() == 0) return u->inner();
    return std::nullopt;
  }
  std::vector<Label> occurring(const Label& s) const override {
    std::vector<Label> out;
    for (const auto& x : t_->occurring(s))
      if (x.tag() == 0) out.push_back(x.inner());
    return out;
  }

  const MonadPtr& inner() const { return t_; }
  const FinSet& errors() const { return errors_; }
  /// The error e as an element of the oracle at any set.
  Label raise(const Label& e) const { return t_->unit(Label::inj(1, e)); }

 protected:
  FinSet make_carrier(const FinSet& x) const override { return t_->carrier(coproduct(x, errors_).set); }

 private:
  MonadPtr t_;
  FinSet errors_;
};

inline std::shared_ptr<const ExceptionOracle> exception_oracle(const MonadPtr& t, const FinSet& errors) {
  return std::make_shared<ExceptionOracle>(t, errors);
}

/// A monad O with element-wise algebra structures S_p(OX) -> OX for each
/// summand: the data needed to compare a coproduct against O.
struct BialgebraOracle {
  MonadPtr monad;
  std::vector<std::function<Label(const Label&)>> structures;
};

/// The oracle T(- + E) as a (T, M_E)-bialgebra; `exception_first` swaps the
/// summand order.
inline BialgebraOracle exception_bialgebra_oracle(const MonadPtr& t, const FinSet& errors, bool exception_first = false) {
  auto o = exception_oracle(t, errors);
  std::function<Label(const Label&)> t_alg = [t](const Label& v) { return t->mult(v); };
  std::function<Label(const Label&)> e_alg = [o](const Label& v) { return v.tag() == 0 ? v.inner() : o->raise(v.inner()); };
  if (exception_first) return {o, {e_alg, t_alg}};
  return {o, {t_alg, e_alg}};
}

struct CompareReport {
  bool sizes_match = false;
  std::size_t carrier_size = 0;
  std::size_t oracle_size = 0;
  bool bijective = false;
  bool unit_ok = false;
  bool algebra_squares_ok = false;
  bool mult_ok = false;
  std::size_t mult_checked = 0;
  bool mult_exhaustive = false;
  std::string mismatch;
  std::optional<FinMap> morphism;

  bool ok() const { return sizes_match && bijective && unit_ok && algebra_squares_ok && mult_ok; }
};

struct CompareOptions {
  /// Check the multiplication square on every element of (⊕S)(⊕S)A when it
  /// has at most this many, else on `samples` pushed-forward ones.
  std::uint64_t exhaustive_limit = kDefaultCap;
  std::size_t samples = 200;
  std::uint64_t seed = 7;
};

/// The unique multialgebra morphism (⊕S)A -> OA extending η^O, checked to be
/// bijective and to commute with units, with every summand structure, and
/// with the multiplications.
inline CompareReport canonical_compare(const CoproductMonad& cop, const BialgebraOracle& oracle, const FinSet& a,
                                       const CompareOptions& opt = {}) {
  CompareReport rep;
  require(oracle.structures.size() == cop.summands().size(), "oracle needs one structure per summand");
  FinSet ca = cop.carrier_or_throw(a);
  const MonadSpec& o = *oracle.monad;
  rep.carrier_size = ca.size();
  Count osize = o.card(a.size());
  rep.oracle_size = osize.saturated ? 0 : static_cast<std::size_t>(osize.value);
  rep.sizes_match = !osize.saturated && osize.value == ca.size();
  if (!rep.sizes_match) {
    rep.mismatch = "carrier has " + std::to_string(ca.size()) + " elements, oracle has " + osize.str();
    return rep;
  }
  FinSet oa = o.carrier(a);
  const BialgebraOracle* orc = &oracle;
  auto lambda = cop.free().extend([orc](std::size_t p, const Label& v) { return orc->structures[p](v); },
                                  [&o](const Label& x) { return o.unit(x); });
  FinMap m = FinMap(ca, oa, [&lambda](const Label& x) { return lambda(x); }).tabulated();
  rep.morphism = m;
  rep.bijective = is_bijective(m);
  if (!rep.bijective) {
    rep.mismatch = "comparison morphism is not bijective";
    return rep;
  }
  rep.unit_ok = true;
  for (const auto& x : a)
    if (m(cop.unit(x)) != o.unit(x)) {
      rep.unit_ok = false;
      rep.mismatch = "unit square fails at " + x.str();
      return rep;
    }
  rep.algebra_squares_ok = true;
  for (std::size_t p = 0; p < cop.summands().size(); ++p) {
    const MonadSpec& s = *cop.summands()[p];
    for (const auto& v : s.carrier(ca, cop.options().cap))
      if (m(cop.structure(p, v)) != oracle.structures[p](s.map(m, v))) {
        rep.algebra_squares_ok = false;
        rep.mismatch = "structure square of " + s.name() + " fails at " + v.str();
        return rep;
      }
  }
  // λ ∘ μ^C = μ^O ∘ O(λ) ∘ λ_C on (⊕S)(⊕S)A.
  auto flatten = cop.mult_extension();
  auto check = [&](const Label& w) {
    Label lhs = m(flatten(w));
    Label inner = lambda(w);  // λ at (⊕S)A, an element of O((⊕S)A)
    Label rhs = o.mult(apply_fn(o, [&m](const Label& c) { return m(c); }, inner));
    return lhs == rhs;
  };
  rep.mult_ok = true;
  const BuildResult& outer = cop.build_at(ca);
  if (outer.converged() && outer.carrier->size() <= opt.exhaustive_limit) {
    rep.mult_exhaustive = true;
    for (const auto& w : *outer.carrier) {
      ++rep.mult_checked;
      if (!check(w)) {
        rep.mult_ok = false;
        rep.mismatch = "multiplication square fails at " + w.str();
        return rep;
      }
    }
  } else {
    LawOptions lo;
    lo.seed = opt.seed;
    detail::Rng rng(opt.seed);
    detail::Sampler sampler(cop, lo, rng);
    for (std::size_t i = 0; i < opt.samples; ++i) {
      auto w = sampler.one(a, 2);
      if (!w) continue;
      ++rep.mult_checked;
      if (!check(*w)) {
        rep.mult_ok = false;
        rep.mismatch = "multiplication square fails at " + w->str();
        return rep;
      }
    }
  }
  return rep;
}

// -------------------------------------------------------------- embeddings

struct EmbeddingReport {
  bool injective = true;
  bool unit_ok = true;
  bool mult_ok = true;
  std::size_t checked = 0;
  std::string failure;
  bool ok() const { return injective && unit_ok && mult_ok; }
};

/// For each summand p and probe A: the embedding S_pA -> (⊕S)A is injective
/// and a monad morphism (unit and multiplication squares on S_pS_pA).
inline EmbeddingReport check_embeddings(const CoproductMonad& cop, const std::vector<FinSet>& probes,
                                        std::uint64_t cap = 1u << 14) {
  EmbeddingReport rep;
  for (std::size_t p = 0; p < cop.summands().size(); ++p) {
    const MonadSpec& s = *cop.summands()[p];
    for (const auto& a : probes) {
      FinSet sa = s.carrier(a);
      FinMap inl(sa, std::nullopt, [&](const Label& e) { return cop.embed(p, e); });
      if (!is_injective(inl)) {
        rep.injective = false;
        rep.failure = "embedding of " + s.name() + " at " + a.str() + " is not injective";
        return rep;
      }
      for (const auto& x : a)
        if (cop.embed(p, s.unit(x)) != cop.unit(x)) {
          rep.unit_ok = false;
          rep.failure = "embedding of " + s.name() + " misses the unit at " + x.str();
          return rep;
        }
      if (!s.card(sa.size()).fits(cap)) continue;
      for (const auto& w : s.carrier(sa)) {
        ++rep.checked;
        // inl ∘ μ^S = μ^C ∘ inl_C ∘ S(inl)
        Label lhs = cop.embed(p, s.mult(w));
        Label rhs = cop.mult(cop.embed(p, apply_fn(s, [&](const Label& e) { return cop.embed(p, e); }, w)));
        if (lhs != rhs) {
          rep.mult_ok = false;
          rep.failure = "embedding of " + s.name() + " breaks the multiplication square at " + w.str();
          return rep;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------- special cases

/// Resolves families with an inconsistent member: the terminal monad absorbs
/// everything; for the ∅-preserving terminal the value at ∅ is the smallest
/// carrier on which the family has a multialgebra (∅ or 1).
inline MonadPtr inconsistent_coproduct(const std::vector<MonadPtr>& monads) {
  for (const auto& m : monads)
    if (classify_consistency(*m) == Consistency::IsoTerminal) return std::make_shared<TerminalMonad>(false);
  auto smallest = enumerate_multialgebras(monads, 1);
  require(!smallest.empty(), "a one-element multialgebra always exists");
  return std::make_shared<TerminalMonad>(smallest.front().carrier.empty());
}

/// The coproduct with an exception summand as the oracle T(- + E), and with
/// its ∅-preserving variant as the oracle or the oracle's zero submonad.
inline std::optional<MonadPtr> special_cases(const MonadPtr& s, const MonadPtr& t) {
  auto ci = classify_consistency(*s), cj = classify_consistency(*t);
  if (ci != Consistency::Consistent || cj != Consistency::Consistent) return inconsistent_coproduct({s, t});
  auto as_exc = [](const MonadPtr& m) { return std::dynamic_pointer_cast<const ExceptionMonad>(m); };
  for (auto [exc, other] : {std::pair{s, t}, std::pair{t, s}}) {
    auto e = as_exc(exc);
    if (!e) continue;
    MonadPtr oracle = exception_oracle(other, e->errors());
    if (e->zero() && other->card(0) == Count::of(0)) return std::make_shared<ZeroSubmonad>(oracle);
    return oracle;
  }
  return std::nullopt;
}

/// The coproduct of a family: inconsistent members are resolved directly,
/// otherwise the chain construction is used.
inline MonadPtr make_coproduct(const std::vector<MonadPtr>& monads, const BuildOptions& opt = {}) {
  for (const auto& m : monads)
    if (classify_consistency(*m) != Consistency::Consistent) return inconsistent_coproduct(monads);
  return coproduct_monad(monads, opt);
}

// ------------------------------------------------------- monad morphisms

struct MonadMorphism {
  MonadPtr from;
  MonadPtr to;
  /// Element-wise component S X -> S' X.
  FinMap::Fn component;
};

/// Unit and multiplication squares and injectivity on the probes.
inline std::optional<std::string> check_monad_morphism(const MonadMorphism& m, const std::vector<FinSet>& probes,
                                                       bool require_injective) {
  const MonadSpec& s = *m.from;
  const MonadSpec& t = *m.to;
  for (const auto& x : probes) {
    for (const auto& a : x)
      if (m.component(s.unit(a)) != t.unit(a)) return "unit square fails at " + a.str();
    FinSet sx = s.carrier(x);
    FinMap comp(sx, std::nullopt, m.component);
    if (require_injective && !is_injective(comp)) return "component at " + x.str() + " is not injective";
    for (const auto& v : sx)
      for (const auto& y : probes)
        if (!x.empty() || y.empty()) {
          FinMap f = FinMap::table(x, y, std::vector<Label>(x.size(), y.empty() ? Label() : y[0]));
          if (!x.empty() && m.component(s.map(f, v)) != t.map(f, m.component(v))) return "naturality fails at " + v.str();
        }
    for (const auto& w : s.carrier(sx)) {
      Label lhs = m.component(s.mult(w));
      Label rhs = t.mult(m.component(apply_fn(s, m.component, w)));
      if (lhs != rhs) return "multiplication square fails at " + w.str();
    }
  }
  return std::nullopt;
}

/// The unique multialgebra morphism (⊕S)A -> (⊕S')A extending η along
/// component-wise injective monad morphisms; checked injective.
inline FinMap injective_morphism_transfer(const std::vector<MonadMorphism>& parts, const CoproductMonad& from,
                                          const CoproductMonad& to, const FinSet& a,
                                          const std::vector<FinSet>& probes = default_probes(2)) {
  require(parts.size() == from.summands().size() && parts.size() == to.summands().size(),
          "one morphism per summand");
  for (const auto& m : parts)
    if (auto bad = check_monad_morphism(m, probes, true))
      fail(Errc::NotInjective, "precondition: " + m.from->name() + " -> " + m.to->name() + ": " + *bad);
  FinSet ca = from.carrier_or_throw(a);
  FinSet cb = to.carrier_or_throw(a);
  const CoproductMonad* tp = &to;
  const std::vector<MonadMorphism>* pp = &parts;
  auto ext = from.free().extend(
      [tp, pp](std::size_t p, const Label& v) { return tp->structure(p, (*pp)[p].component(v)); },
      [tp](const Label& x) { return tp->unit(x); });
  FinMap g = FinMap(ca, cb, [&ext](const Label& x) { return ext(x); }).tabulated();
  if (!is_injective(g)) fail(Errc::NotInjective, "transferred morphism is not injective");
  return g;
}

// ------------------------------------------------- universal property

struct UniversalReport {
  bool ok = true;
  std::size_t targets = 0;
  std::size_t base_maps = 0;
  std::string failure;
};

/// For every multialgebra B with |B| ≤ max_size and every h : A -> B, exactly
/// one multialgebra morphism (⊕S)A -> B restricts to h along η, and it is the
/// one both the element recursion and the chain recursion compute.
inline UniversalReport verify_universal_property(const CoproductMonad& cop, const FinSet& a, std::size_t max_size) {
  UniversalReport rep;
  FinSet ca = cop.carrier_or_throw(a);
  Multialgebra free_alg = cop.multialgebra_at(a);
  const BuildResult& built = cop.build_at(a);
  for (const auto& b : enumerate_multialgebras(cop.summands(), max_size)) {
    ++rep.targets;
    for_each_map(a, b.carrier, [&](const FinMap& h) {
      ++rep.base_maps;
      auto ext = cop.free().extend(b, h.fn());
      FinMap rec = FinMap(ca, b.carrier, [&ext](const Label& x) { return ext(x); }).tabulated();
      auto parts = recurse(built.chain, cop.free().g_algebra(b, h.fn()));
      for (const auto& x : ca) {
        Label via_chain = x.tag() == cop.base_tag() ? h(x.inner()) : parts[static_cast<std::size_t>(x.tag())](x.inner());
        if (via_chain != rec(x)) {
          rep.ok = false;
          rep.failure = "chain recursion and element recursion disagree at " + x.str();
          return false;
        }
      }
      std::size_t count = 0;
      bool found_rec = false;
      for_each_map(ca, b.carrier, [&](const FinMap& g) {
        for (const auto& x : a)
          if (g(cop.unit(x)) != h(x)) return true;
        if (!is_multialgebra_morphism(free_alg, b, g)) return true;
        ++count;
        if (same_on_domain(g, rec)) found_rec = true;
        return true;
      });
      if (count != 1 || !found_rec) {
        rep.ok = false;
        rep.failure = std::to_string(count) + " morphisms into a target of size " + std::to_string(b.carrier.size());
        return false;
      }
      return true;
    });
    if (!rep.ok) return rep;
  }
  return rep;
}

}  // namespace copro
