#pragma once

// Layered terms: canonical alternating trees of non-unit layers over
// variables, one side per monad of a family. They name the elements of the
// coproduct without materializing carriers.

#include <copro/complement.hpp>
#include <copro/coproduct.hpp>
#include <copro/monad.hpp>

#include <unordered_map>

namespace copro {

/// Var(a) or Layer(side, op over {0..n-1}, n children). The wrapped label is
/// (0, a) or (side + 1, n, op, (children...)), so the label order is the
/// canonical term order: Var < side 0 < side 1 < ..., then arity, op, children.
class LayeredTerm {
 public:
  LayeredTerm() = default;
  explicit LayeredTerm(Label l) : label_(std::move(l)) {
    require(label_.is(Label::Kind::Tuple) && (label_.size() == 2 || label_.size() == 4), "not a layered term: " + label_.str());
  }

  static LayeredTerm var(const Label& a) { return LayeredTerm(Label::tuple({Label::num(0), a})); }
  /// A layer as given; see LayeredTerms::normalize for the canonical form.
  static LayeredTerm layer(std::size_t side, const Label& op, const std::vector<LayeredTerm>& children) {
    std::vector<Label> kids;
    for (const auto& c : children) kids.push_back(c.label());
    return LayeredTerm(Label::tuple({Label::num(static_cast<std::int64_t>(side) + 1),
                                     Label::num(static_cast<std::int64_t>(kids.size())), op, Label::tuple(std::move(kids))}));
  }

  const Label& label() const { return label_; }
  bool is_var() const { return label_[0].number() == 0; }
  const Label& value() const {
    require(is_var(), "value of a layer");
    return label_[1];
  }
  std::size_t side() const {
    require(!is_var(), "side of a variable");
    return static_cast<std::size_t>(label_[0].number() - 1);
  }
  std::size_t arity() const { return is_var() ? 0 : static_cast<std::size_t>(label_[1].number()); }
  const Label& op() const {
    require(!is_var(), "op of a variable");
    return label_[2];
  }
  LayeredTerm child(std::size_t i) const { return LayeredTerm(label_[3][i]); }
  std::vector<LayeredTerm> children() const {
    std::vector<LayeredTerm> out;
    if (!is_var())
      for (const auto& c : label_[3].children()) out.emplace_back(c);
    return out;
  }
  /// Top side, or nullopt for a variable.
  std::optional<std::size_t> top() const {
    if (is_var()) return std::nullopt;
    return side();
  }

  friend bool operator==(const LayeredTerm& a, const LayeredTerm& b) { return a.label_ == b.label_; }
  friend auto operator<=>(const LayeredTerm& a, const LayeredTerm& b) { return a.label_ <=> b.label_; }

 private:
  Label label_ = Label::tuple({Label::num(0), Label::num(0)});
};

struct LayeredTermHash {
  std::size_t operator()(const LayeredTerm& t) const noexcept { return t.label().hash(); }
};

/// Term operations for a family of monads.
class LayeredTerms {
 public:
  explicit LayeredTerms(std::vector<MonadPtr> monads, std::vector<std::string> side_names = {})
      : monads_(std::move(monads)), names_(std::move(side_names)) {
    require(monads_.size() >= 2, "layered terms need at least two monads");
    if (names_.empty())
      for (std::size_t p = 0; p < monads_.size(); ++p) names_.push_back(p < 2 ? (p == 0 ? "L" : "R") : "S" + std::to_string(p));
  }

  const std::vector<MonadPtr>& monads() const { return monads_; }

  /// Unit layers collapse, same-side children are pooled through the
  /// monad's multiplication, the op is cut down to its least support and the
  /// children are sorted.
  LayeredTerm normalize(const LayeredTerm& t) const {
    if (t.is_var()) return t;
    std::vector<LayeredTerm> kids;
    for (const auto& c : t.children()) kids.push_back(normalize(c));
    return assemble(t.side(), t.op(), kids);
  }

  /// normalize(Layer(side, op, children)) with children already canonical.
  LayeredTerm assemble(std::size_t p, const Label& op, const std::vector<LayeredTerm>& kids) const {
    const MonadSpec& s = *monads_.at(p);
    // The pool: grandchildren under same-side children, other children as they are.
    std::vector<Label> pool;
    bool lift = false;
    for (const auto& k : kids) {
      if (k.top() == p) {
        lift = true;
        for (const auto& g : k.label()[3].children()) pool.push_back(g);
      } else {
        pool.push_back(k.label());
      }
    }
    pool = detail::sorted_unique(std::move(pool));
    auto index = [&pool](const Label& x) {
      auto it = std::lower_bound(pool.begin(), pool.end(), x);
      return Label::num(it - pool.begin());
    };
    auto child_of = [&kids](const Label& i) -> const LayeredTerm& {
      auto k = static_cast<std::size_t>(i.number());
      require(i.is(Label::Kind::Num) && k < kids.size(), "op mentions an index without a child: " + i.str());
      return kids[k];
    };
    Label pooled;
    if (!lift) {
      pooled = apply_fn(s, [&](const Label& i) { return index(child_of(i).label()); }, op);
    } else {
      Label nested = apply_fn(s, [&](const Label& i) {
        const LayeredTerm& k = child_of(i);
        if (k.top() != p) return s.unit(index(k.label()));
        Label grand = k.label()[3];
        return apply_fn(s, [&](const Label& j) { return index(grand[static_cast<std::size_t>(j.number())]); }, k.op());
      }, op);
      pooled = s.mult(nested);
    }
    if (auto u = s.unit_preimage(pooled)) return LayeredTerm(pool[static_cast<std::size_t>(u->number())]);
    FinSet idx = FinSet::range(pool.size());
    std::vector<Label> support = minimal_support(s, idx, pooled);
    std::unordered_map<Label, Label, LabelHash> reindex;
    std::vector<LayeredTerm> children;
    for (std::size_t k = 0; k < support.size(); ++k) {
      reindex.emplace(support[k], Label::num(static_cast<std::int64_t>(k)));
      children.emplace_back(pool[static_cast<std::size_t>(support[k].number())]);
    }
    FinSet uset = FinSet::from_sorted(support);
    Label restricted = apply_fn(s, [&](const Label& i) {
      auto it = reindex.find(i);
      if (it == reindex.end()) fail(Errc::ContractViolation, s.name() + ": " + pooled.str() + " mentions " + i.str() + " outside its support");
      return it->second;
    }, pooled);
    return LayeredTerm::layer(p, restricted, children);
  }

  LayeredTerm unit(const Label& a) const { return LayeredTerm::var(a); }

  /// The element s of S_p(A) as a term: a variable or a single layer.
  LayeredTerm embed(std::size_t p, const Label& s) const {
    const MonadSpec& m = *monads_.at(p);
    std::vector<Label> vars = detail::sorted_unique(m.occurring(s));
    std::vector<LayeredTerm> kids;
    std::unordered_map<Label, Label, LabelHash> idx;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      idx.emplace(vars[i], Label::num(static_cast<std::int64_t>(i)));
      kids.push_back(LayeredTerm::var(vars[i]));
    }
    Label op = apply_fn(m, [&idx](const Label& a) { return idx.at(a); }, s);
    return assemble(p, op, kids);
  }
  LayeredTerm embed_left(const Label& s) const { return embed(0, s); }
  LayeredTerm embed_right(const Label& s) const { return embed(1, s); }

  /// Replace variables and renormalize layer by layer. `max_height` bounds
  /// the result; exceeding it is an error rather than a truncation.
  LayeredTerm subst(const LayeredTerm& t, const std::function<LayeredTerm(const Label&)>& assign,
                    std::optional<std::size_t> max_height = std::nullopt) const {
    std::unordered_map<Label, LayeredTerm, LabelHash> memo;
    LayeredTerm out = subst_rec(t, assign, memo);
    if (max_height && height(out) > *max_height)
      fail(Errc::BudgetExceeded, "substitution result has height " + std::to_string(height(out)) + " > " +
                                     std::to_string(*max_height));
    return out;
  }

  /// Flattens a term whose variables are terms.
  LayeredTerm mult(const LayeredTerm& t) const {
    return subst(t, [](const Label& inner) { return LayeredTerm(inner); });
  }

  /// Layer depth, or the flattened height for monads that report one.
  std::size_t height(const LayeredTerm& t) const {
    if (t.is_var()) return 0;
    auto kids = t.children();
    const MonadSpec& s = *monads_[t.side()];
    return s.layer_height(t.op(), [&](const Label& i) { return height(kids[static_cast<std::size_t>(i.number())]); });
  }

  /// Every variable a term mentions.
  std::vector<Label> variables(const LayeredTerm& t) const {
    std::vector<Label> out;
    collect(t, out);
    return detail::sorted_unique(std::move(out));
  }

  /// Alternation, non-unit ops, sorted distinct children and full support.
  std::optional<std::string> canonical_violation(const LayeredTerm& t) const {
    if (t.is_var()) return std::nullopt;
    const MonadSpec& s = *monads_.at(t.side());
    auto kids = t.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i].top() == t.side()) return "child " + std::to_string(i) + " has the same side";
      if (i > 0 && !(kids[i - 1] < kids[i])) return "children are not strictly increasing";
      if (auto bad = canonical_violation(kids[i])) return bad;
    }
    if (s.unit_preimage(t.op())) return "op " + t.op().str() + " is a unit";
    if (minimal_support(s, FinSet::range(kids.size()), t.op()).size() != kids.size()) return "op " + t.op().str() + " does not use every child";
    return std::nullopt;
  }

  /// All canonical terms of height at most `depth` over A.
  std::vector<LayeredTerm> enumerate(const FinSet& a, std::size_t depth, std::uint64_t cap = kDefaultCap) const {
    for (const auto& m : monads_) require(m->finite_valued(), "enumerate needs finite-valued monads");
    std::vector<LayeredTerm> level;
    for (const auto& x : a) level.push_back(LayeredTerm::var(x));
    for (std::size_t d = 1; d <= depth; ++d) {
      std::vector<LayeredTerm> next;
      for (const auto& x : a) next.push_back(LayeredTerm::var(x));
      for (std::size_t p = 0; p < monads_.size(); ++p) {
        std::vector<LayeredTerm> pool;
        for (const auto& t : level)
          if (t.top() != p) pool.push_back(t);
        ComplementView bar(monads_[p]);
        for (const auto& op : bar.carrier_at(FinSet::range(pool.size()), cap)) next.push_back(assemble(p, op, pool));
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      if (next == level) break;
      level = std::move(next);
    }
    return level;
  }

  /// One node per line, children indented under their layer.
  std::string pretty(const LayeredTerm& t, std::size_t indent = 0) const {
    std::string pad(indent * 2, ' ');
    if (t.is_var()) return pad + t.value().str() + "\n";
    std::string out = pad + names_[t.side()] + " " + t.op().str() + "\n";
    for (const auto& c : t.children()) out += pretty(c, indent + 1);
    return out;
  }

  /// One-line form: L{0,1}[a, R(e0)[]].
  std::string str(const LayeredTerm& t) const {
    if (t.is_var()) return t.value().str();
    std::string out = names_[t.side()] + t.op().str() + "[";
    bool first = true;
    for (const auto& c : t.children()) {
      out += (first ? "" : ", ") + str(c);
      first = false;
    }
    return out + "]";
  }

 private:
  LayeredTerm subst_rec(const LayeredTerm& t, const std::function<LayeredTerm(const Label&)>& assign,
                        std::unordered_map<Label, LayeredTerm, LabelHash>& memo) const {
    if (auto it = memo.find(t.label()); it != memo.end()) return it->second;
    LayeredTerm out;
    if (t.is_var()) {
      out = assign(t.value());
    } else {
      std::vector<LayeredTerm> kids;
      for (const auto& c : t.children()) kids.push_back(subst_rec(c, assign, memo));
      out = assemble(t.side(), t.op(), kids);
    }
    memo.emplace(t.label(), out);
    return out;
  }

  void collect(const LayeredTerm& t, std::vector<Label>& out) const {
    if (t.is_var()) {
      out.push_back(t.value());
      return;
    }
    for (const auto& c : t.children()) collect(c, out);
  }

  std::vector<MonadPtr> monads_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------- mode agreement

/// Translation between carrier elements of a materialized coproduct and
/// layered terms.
class TermTranslation {
 public:
  explicit TermTranslation(const CoproductMonad& cop) : cop_(cop), terms_(cop.summands()) {}

  const LayeredTerms& terms() const { return terms_; }

  LayeredTerm to_term(const Label& x) const {
    if (auto it = to_.find(x); it != to_.end()) return it->second;
    LayeredTerm out;
    if (x.tag() == cop_.base_tag()) {
      out = LayeredTerm::var(x.inner());
    } else {
      auto p = static_cast<std::size_t>(x.tag());
      const MonadSpec& s = *cop_.summands()[p];
      std::vector<Label> elems = detail::sorted_unique(s.occurring(x.inner()));
      std::unordered_map<Label, Label, LabelHash> idx;
      std::vector<LayeredTerm> kids;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        idx.emplace(elems[i], Label::num(static_cast<std::int64_t>(i)));
        kids.push_back(to_term(elems[i]));
      }
      std::sort(kids.begin(), kids.end());
      // Children sorted as terms; rebuild the index to match that order.
      std::unordered_map<Label, Label, LabelHash> pos;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        auto it = std::lower_bound(kids.begin(), kids.end(), to_term(elems[i]));
        pos.emplace(elems[i], Label::num(it - kids.begin()));
      }
      Label op = apply_fn(s, [&pos](const Label& c) { return pos.at(c); }, x.inner());
      out = terms_.assemble(p, op, kids);
    }
    to_.emplace(x, out);
    return out;
  }

  Label from_term(const LayeredTerm& t) const {
    if (t.is_var()) return cop_.unit(t.value());
    auto kids = t.children();
    const MonadSpec& s = *cop_.summands()[t.side()];
    Label inner = apply_fn(s, [&](const Label& i) { return from_term(kids[static_cast<std::size_t>(i.number())]); }, t.op());
    return cop_.free().layer(t.side(), inner);
  }

 private:
  const CoproductMonad& cop_;
  LayeredTerms terms_;
  mutable std::unordered_map<Label, LayeredTerm, LabelHash> to_;
};

struct ModeAgreementReport {
  bool ok = true;
  std::size_t carrier_size = 0;
  std::size_t enumerated = 0;
  std::size_t depth = 0;
  std::size_t mult_checked = 0;
  bool mult_exhaustive = false;
  std::string failure;
};

/// The enumeration at the convergence depth is in bijection with the
/// materialized carrier, and the bijection carries unit, multiplication and
/// embeddings to Var, substitution and embed.
inline ModeAgreementReport check_mode_agreement(const CoproductMonad& cop, const FinSet& a, std::size_t samples = 200,
                                                std::uint64_t exhaustive_limit = 4096, std::uint64_t seed = 11) {
  ModeAgreementReport rep;
  const BuildResult& built = cop.build_at(a);
  if (!built.converged()) fail(Errc::NoConvergence, cop.name() + ": " + built.chain.reason);
  const FinSet& ca = *built.carrier;
  TermTranslation tr(cop);
  const LayeredTerms& lt = tr.terms();
  rep.depth = built.chain.solution->converged_at;
  rep.carrier_size = ca.size();
  auto bad = [&rep](std::string why) {
    rep.ok = false;
    rep.failure = std::move(why);
    return rep;
  };
  auto listed = lt.enumerate(a, rep.depth);
  rep.enumerated = listed.size();
  std::vector<LayeredTerm> images;
  for (const auto& x : ca) {
    LayeredTerm t = tr.to_term(x);
    if (auto v = lt.canonical_violation(t)) return bad("term for " + x.str() + " is not canonical: " + *v);
    if (lt.height(t) > rep.depth) return bad("term for " + x.str() + " is deeper than the convergence stage");
    if (tr.from_term(t) != x) return bad("from_term does not invert to_term at " + x.str());
    images.push_back(t);
  }
  std::sort(images.begin(), images.end());
  if (std::adjacent_find(images.begin(), images.end()) != images.end()) return bad("two carrier elements share a term");
  if (images != listed)
    return bad("enumeration has " + std::to_string(listed.size()) + " terms, carrier has " + std::to_string(ca.size()));
  for (const auto& x : a)
    if (tr.to_term(cop.unit(x)) != lt.unit(x)) return bad("unit disagrees at " + x.str());
  for (std::size_t p = 0; p < cop.summands().size(); ++p)
    for (const auto& s : cop.summands()[p]->carrier(a))
      if (tr.to_term(cop.embed(p, s)) != lt.embed(p, s)) return bad("embedding " + std::to_string(p) + " disagrees at " + s.str());
  // Multiplication on (⊕S)(⊕S)A: exhaustive when small, else sampled.
  std::vector<Label> outer;
  const BuildResult* big = nullptr;
  if (cop.card(ca.size()).fits(exhaustive_limit)) big = &cop.build_at(ca);
  if (big && big->converged()) {
    rep.mult_exhaustive = true;
    outer = big->carrier->elements();
  } else {
    LawOptions lo;
    detail::Rng rng(seed);
    detail::Sampler sampler(cop, lo, rng);
    for (std::size_t i = 0; i < samples * 4 && outer.size() < samples; ++i)
      if (auto w = sampler.one(a, 2)) outer.push_back(*w);
  }
  auto flatten = cop.mult_extension();
  for (const auto& w : outer) {
    ++rep.mult_checked;
    LayeredTerm lhs = tr.to_term(flatten(w));
    LayeredTerm rhs = lt.subst(tr.to_term(w), [&tr](const Label& c) { return tr.to_term(c); });
    if (lhs != rhs) return bad("multiplication disagrees at " + w.str());
  }
  return rep;
}

}  // namespace copro
