#pragma once

// The Trnková closure at ∅ (equalizer of Ht, Hf : H1 -> H2), the induced
// monad closure, zero submonads, and the closed / zero-of-closed dichotomy.

#include <copro/monad.hpp>

namespace copro {

enum class ClosureKind { AlreadyClosed, ZeroOfClosure };

inline std::string_view to_string(ClosureKind k) {
  return k == ClosureKind::AlreadyClosed ? "already-closed" : "zero-of-closure";
}

struct ClosureResult {
  /// E ⊆ H1, the value of the closure at ∅.
  FinSet value_at_empty;
  /// H(∅ -> 1) : H∅ -> E.
  FinMap reflection_at_empty;
  ClosureKind classification = ClosureKind::AlreadyClosed;
  bool reflection_bijective = false;
};

namespace detail {

inline FinMap point(std::int64_t v) { return FinMap::table(FinSet::range(1), FinSet::range(2), {Label::num(v)}); }

}  // namespace detail

/// E = equalizer of H(t), H(f) for t(0) = 1, f(0) = 0, with the reflection
/// r = H(∅ -> 1) and the classification of H at ∅.
inline ClosureResult closure_at_empty(const MonadSpec& h) {
  FinSet one = FinSet::range(1);
  FinSet h1 = h.carrier(one);
  FinMap t = detail::point(1), f = detail::point(0);
  FinMap ht(h1, std::nullopt, [&](const Label& s) { return h.map(t, s); });
  FinMap hf(h1, std::nullopt, [&](const Label& s) { return h.map(f, s); });
  Equalizer eq = equalizer(ht, hf);
  FinSet h0 = h.carrier(FinSet{});
  FinMap bang = FinMap::table(FinSet{}, one, {});
  std::vector<Label> imgs;
  for (const auto& s : h0) {
    Label img = h.map(bang, s);
    if (!eq.set.contains(img)) fail(Errc::ContractViolation, h.name() + ": H(∅ -> 1) leaves the equalizer at " + s.str());
    imgs.push_back(img);
  }
  ClosureResult out{eq.set, FinMap::table(h0, eq.set, std::move(imgs))};
  out.reflection_bijective = is_bijective(out.reflection_at_empty);
  out.classification = h0.empty() ? ClosureKind::ZeroOfClosure : ClosureKind::AlreadyClosed;
  return out;
}

/// ZeroOfClosure iff S∅ = ∅; otherwise the reflection at ∅ has to be
/// bijective, and a failure means the monad is not lawful.
inline ClosureKind classify(const MonadSpec& s) {
  ClosureResult r = closure_at_empty(s);
  if (r.classification == ClosureKind::AlreadyClosed && !r.reflection_bijective)
    fail(Errc::ClassificationViolation, s.name() + ": S∅ is nonempty but the reflection at ∅ is not bijective");
  return r.classification;
}

/// The closure of a monad: S on nonempty sets, the equalizer E at ∅.
class MonadClosure final : public MonadSpec {
 public:
  explicit MonadClosure(MonadPtr base) : base_(std::move(base)), closure_(closure_at_empty(*base_)) {}

  std::string name() const override { return "closure(" + base_->name() + ")"; }
  bool finite_valued() const override { return base_->finite_valued(); }
  bool has_structure() const override { return base_->has_structure(); }
  Count card(std::size_t n) const override { return n == 0 ? Count::of(closure_.value_at_empty.size()) : base_->card(n); }

  Label map(const FinMap& f, const Label& s) const override {
    if (!f.dom().empty()) return base_->map(f, s);
    // From ∅: e ∈ E ⊆ S1 moves along any point of the target.
    if (!f.has_cod() || f.cod().empty()) return s;
    return base_->map(FinMap::table(FinSet::range(1), f.cod(), {f.cod()[0]}), s);
  }
  Label unit(const Label& x) const override { return base_->unit(x); }
  Label mult(const Label& w) const override { return base_->mult(w); }
  std::optional<Label> unit_preimage(const Label& s) const override { return base_->unit_preimage(s); }
  std::vector<Label> occurring(const Label& s) const override { return base_->occurring(s); }
  std::optional<std::vector<Label>> support_override(const Label& s) const override {
    return base_->support_override(s);
  }

  const ClosureResult& closure() const { return closure_; }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    return x.empty() ? closure_.value_at_empty : base_->carrier(x);
  }

 private:
  MonadPtr base_;
  ClosureResult closure_;
};

inline MonadPtr monad_closure(const MonadPtr& s) {
  if (classify_consistency(*s) != Consistency::Consistent)
    fail(Errc::InconsistentMonad, s->name() + " is inconsistent");
  return std::make_shared<MonadClosure>(s);
}

inline MonadPtr zero_submonad(const MonadPtr& s) { return std::make_shared<ZeroSubmonad>(s); }

/// Number of ŝ_∅ : E -> K∅ with ŝ_∅ ∘ r = s_∅ and K(∅ -> Y) ∘ ŝ_∅ = s_Y ∘ Ĥ(∅ -> Y)
/// on every nonempty probe Y. The reflection is universal when this is 1.
inline std::size_t count_factorizations(const MonadSpec& h, const MonadSpec& k,
                                        const std::function<Label(const FinSet&, const Label&)>& s,
                                        const std::vector<FinSet>& probes = default_probes()) {
  ClosureResult c = closure_at_empty(h);
  FinSet k0 = k.carrier(FinSet{});
  std::size_t count = 0;
  for_each_map(c.value_at_empty, k0, [&](const FinMap& hat) {
    for (const auto& x : c.reflection_at_empty.dom())
      if (hat(c.reflection_at_empty(x)) != s(FinSet{}, x)) return true;
    for (const auto& y : probes) {
      if (y.empty()) continue;
      FinMap from_empty = FinMap::table(FinSet{}, y, {});
      FinMap at_point = FinMap::table(FinSet::range(1), y, {y[0]});
      for (const auto& e : c.value_at_empty)
        if (k.map(from_empty, hat(e)) != s(y, h.map(at_point, e))) return true;
    }
    ++count;
    return true;
  });
  return count;
}

// ------------------------------------------- exceptional / constant evidence

struct ExceptionalEvidence {
  bool exceptional = false;
  bool constant = false;
  /// S1 minus the unit (exceptional) or S1 (constant).
  FinSet values;
  std::string note;
};

namespace detail {

/// A bijection ŜX -> target X at every probe, fixed at 1 by `at_one`, found by
/// search under naturality along X -> 1 and 1 -> X, then checked natural
/// along every map between probes.
inline bool natural_iso(const MonadSpec& s, const MonadSpec& target, const FinMap& at_one,
                        const std::vector<FinSet>& probes, std::string& note) {
  FinSet one = FinSet::range(1);
  std::vector<std::pair<FinSet, FinMap>> found;
  for (const auto& x : probes) {
    FinSet sx = s.carrier(x), tx = target.carrier(x);
    if (sx.size() != tx.size()) {
      note = "sizes differ at a " + std::to_string(x.size()) + "-element set";
      return false;
    }
    std::optional<FinMap> phi;
    if (x == one) {
      phi = at_one;
    } else {
      phi = search_bijection(sx, tx, [&](const FinMap& cand) {
        FinMap bang = FinMap::table(x, one, std::vector<Label>(x.size(), Label::num(0)));
        for (const auto& e : sx)
          if (at_one(s.map(bang, e)) != target.map(bang, cand(e))) return false;
        for (const auto& pt : x) {
          FinMap h = FinMap::table(one, x, {pt});
          for (const auto& u : s.carrier(one))
            if (cand(s.map(h, u)) != target.map(h, at_one(u))) return false;
        }
        return true;
      });
    }
    if (!phi) {
      note = "no natural bijection at a " + std::to_string(x.size()) + "-element set";
      return false;
    }
    found.emplace_back(x, *phi);
  }
  for (const auto& [x, phx] : found)
    for (const auto& [y, phy] : found) {
      if (!x.empty() && y.empty()) continue;
      bool natural = true;
      for_each_map(x, y, [&](const FinMap& f) {
        for (const auto& e : phx.dom())
          if (phy(s.map(f, e)) != target.map(f, phx(e))) {
            natural = false;
            return false;
          }
        return true;
      });
      if (!natural) {
        note = "bijections are not natural between sizes " + std::to_string(x.size()) + " and " + std::to_string(y.size());
        return false;
      }
    }
  return true;
}

inline bool natural_iso_or_budget(const MonadSpec& s, const MonadSpec& target, const FinMap& at_one,
                                  const std::vector<FinSet>& probes, std::string& note) {
  try {
    return natural_iso(s, target, at_one, probes, note);
  } catch (const Error& e) {
    if (e.code() != Errc::BudgetExceeded) throw;
    note = e.what();
    return false;
  }
}

}  // namespace detail

/// Probe-level evidence that the closure of S is an exception monad or a
/// constant functor. Not a proof: it only inspects sets of size ≤ 3.
inline ExceptionalEvidence substantially_exceptional(const MonadPtr& s, const std::vector<FinSet>& probes = default_probes()) {
  ExceptionalEvidence out;
  out.note = "probe-level evidence on sets of size <= " + std::to_string(probes.empty() ? 0 : probes.back().size());
  MonadPtr closed = std::make_shared<MonadClosure>(s);
  FinSet one = FinSet::range(1);
  FinSet s1 = closed->carrier(one);
  std::string why;
  if (s->has_structure()) {
    std::vector<Label> errs;
    for (const auto& e : s1)
      if (!s->unit_preimage(e)) errs.push_back(e);
    FinSet errors = FinSet::from_sorted(errs);
    ExceptionMonad target("exception", errors, false);
    std::vector<Label> imgs;
    for (const auto& e : s1) imgs.push_back(s->unit_preimage(e) ? target.unit(*s->unit_preimage(e)) : Label::inj(1, e));
    FinMap at_one = FinMap::table(s1, target.carrier(one), imgs);
    if (is_bijective(at_one) && detail::natural_iso_or_budget(*closed, target, at_one, probes, why)) {
      out.exceptional = true;
      out.values = errors;
    }
  }
  ConstFunctor cst(s1, false);
  if (detail::natural_iso_or_budget(*closed, cst, FinMap::identity(s1), probes, why)) {
    out.constant = true;
    out.values = s1;
  }
  if (!out.exceptional && !out.constant) out.note += "; " + why;
  return out;
}

}  // namespace copro
