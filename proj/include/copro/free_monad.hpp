#pragma once

// Free monads on finite signatures: term trees with grafting, the
// F A ≅ H F A + A bijection, and coproducts involving free monads through
// layered terms.

#include <copro/layered.hpp>
#include <copro/monad.hpp>

#include <map>
#include <sstream>

namespace copro {

struct Operation {
  std::string name;
  std::size_t arity = 0;
};

struct Signature {
  std::vector<Operation> ops;

  Signature() = default;
  explicit Signature(std::vector<Operation> o) : ops(std::move(o)) {
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = i + 1; j < ops.size(); ++j)
        if (ops[i].name == ops[j].name) fail(Errc::ContractViolation, "duplicate operation " + ops[i].name);
  }

  std::optional<std::size_t> arity_of(const std::string& name) const {
    for (const auto& o : ops)
      if (o.name == name) return o.arity;
    return std::nullopt;
  }
  bool only_constants() const {
    return std::all_of(ops.begin(), ops.end(), [](const Operation& o) { return o.arity == 0; });
  }
  std::string str() const {
    std::string out;
    for (const auto& o : ops) out += (out.empty() ? "" : ",") + o.name + "/" + std::to_string(o.arity);
    return out;
  }
};

/// Parses "f/2,c/0"; the empty string is the empty signature.
inline Signature parse_signature(const std::string& text) {
  std::vector<Operation> ops;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto slash = item.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size())
      fail(Errc::ContractViolation, "operation '" + item + "' is not name/arity");
    std::size_t arity = 0;
    for (char c : item.substr(slash + 1)) {
      if (c < '0' || c > '9') fail(Errc::ContractViolation, "bad arity in '" + item + "'");
      arity = arity * 10 + static_cast<std::size_t>(c - '0');
    }
    ops.push_back({item.substr(0, slash), arity});
  }
  return Signature(std::move(ops));
}

/// Σ + Σ' with clashing names of the second summand primed.
inline Signature sum_signature(const Signature& a, const Signature& b) {
  std::vector<Operation> ops = a.ops;
  for (auto o : b.ops) {
    while (a.arity_of(o.name)) o.name += "'";
    ops.push_back(o);
  }
  return Signature(std::move(ops));
}

/// F_Σ: terms over X. Var(a) is in0(a); an operation node is
/// in1((name, children...)).
class FreeMonad final : public MonadSpec {
 public:
  explicit FreeMonad(Signature sig) : sig_(std::move(sig)) {}

  const Signature& signature() const { return sig_; }

  static Label var(const Label& a) { return Label::inj(0, a); }
  static Label op(const std::string& name, std::vector<Label> kids) {
    kids.insert(kids.begin(), Label::sym(name));
    return Label::inj(1, Label::tuple(std::move(kids)));
  }
  static bool is_var(const Label& t) { return t.tag() == 0; }
  static const std::string& op_name(const Label& t) { return t.inner()[0].name(); }
  static std::vector<Label> op_children(const Label& t) {
    auto k = t.inner().children();
    return {k.begin() + 1, k.end()};
  }

  std::string name() const override { return "free(" + sig_.str() + ")"; }
  bool finite_valued() const override { return sig_.only_constants(); }

  Count card(std::size_t n) const override {
    if (sig_.only_constants()) return Count::of(n + sig_.ops.size());
    return n == 0 && no_constants() ? Count::of(0) : Count::huge();
  }

  Label map(const FinMap& f, const Label& t) const override {
    return relabel(t, [&f](const Label& a) { return var(f(a)); });
  }
  Label unit(const Label& a) const override { return var(a); }
  Label mult(const Label& w) const override {
    return relabel(w, [](const Label& inner) { return inner; });
  }
  std::optional<Label> unit_preimage(const Label& t) const override {
    if (is_var(t)) return t.inner();
    return std::nullopt;
  }
  std::vector<Label> occurring(const Label& t) const override {
    std::vector<Label> out;
    collect(t, out);
    return detail::sorted_unique(std::move(out));
  }
  std::optional<std::vector<Label>> support_override(const Label& t) const override { return occurring(t); }
  std::size_t layer_height(const Label& t, const std::function<std::size_t(const Label&)>& height) const override {
    if (is_var(t)) return height(t.inner());
    std::size_t h = 0;
    for (const auto& k : op_children(t)) h = std::max(h, layer_height(k, height));
    return h + 1;
  }

  /// Operation nodes in a term.
  static std::size_t size(const Label& t) {
    if (is_var(t)) return 0;
    std::size_t s = 1;
    for (const auto& k : op_children(t)) s += size(k);
    return s;
  }
  static std::size_t height(const Label& t) {
    if (is_var(t)) return 0;
    std::size_t h = 0;
    for (const auto& k : op_children(t)) h = std::max(h, height(k));
    return h + 1;
  }

  /// Terms of height at most h, sorted. BudgetExceeded past `cap`.
  std::vector<Label> enumerate(const FinSet& x, std::size_t h, std::uint64_t cap = kDefaultCap) const {
    std::vector<Label> level;
    for (const auto& a : x) level.push_back(var(a));
    for (std::size_t d = 1; d <= h; ++d) {
      Count total = Count::of(x.size());
      for (const auto& o : sig_.ops) total = total + Count::pow(Count::of(level.size()), Count::of(o.arity));
      if (!total.fits(cap)) fail(Errc::BudgetExceeded, "terms of height " + std::to_string(d) + ": " + total.str());
      std::vector<Label> next;
      for (const auto& a : x) next.push_back(var(a));
      for (const auto& o : sig_.ops) for_each_tuple(level, o.arity, [&](std::vector<Label> kids) { next.push_back(op(o.name, std::move(kids))); });
      next = detail::sorted_unique(std::move(next));
      if (next == level) break;
      level = std::move(next);
    }
    return level;
  }

  /// Terms with exactly k operation nodes, sorted.
  std::vector<Label> enumerate_by_size(const FinSet& x, std::size_t k) const {
    std::vector<std::vector<Label>> by(k + 1);
    for (const auto& a : x) by[0].push_back(var(a));
    for (std::size_t s = 1; s <= k; ++s)
      for (const auto& o : sig_.ops) {
        if (o.arity == 0) {
          if (s == 1) by[s].push_back(op(o.name, {}));
          continue;
        }
        // Distribute s - 1 nodes over the children.
        std::vector<Label> kids(o.arity);
        std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t i, std::size_t left) {
          if (i + 1 == o.arity) {
            for (const auto& t : by[left]) {
              kids[i] = t;
              by[s].push_back(op(o.name, kids));
            }
            return;
          }
          for (std::size_t take = 0; take <= left; ++take)
            for (const auto& t : by[take]) {
              kids[i] = t;
              fill(i + 1, left - take);
            }
        };
        fill(0, s - 1);
      }
    return detail::sorted_unique(std::move(by[k]));
  }

  std::string pretty(const Label& t) const {
    if (is_var(t)) return t.inner().str();
    std::string out = op_name(t);
    auto kids = op_children(t);
    if (kids.empty()) return out;
    out += "(";
    for (std::size_t i = 0; i < kids.size(); ++i) out += (i ? "," : "") + pretty(kids[i]);
    return out + ")";
  }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    if (!sig_.only_constants())
      fail(Errc::BudgetExceeded, name() + " has infinitely many terms over a nonempty set");
    std::vector<Label> out;
    for (const auto& a : x) out.push_back(var(a));
    for (const auto& o : sig_.ops) out.push_back(op(o.name, {}));
    return FinSet(std::move(out));
  }

 private:
  bool no_constants() const {
    return std::none_of(sig_.ops.begin(), sig_.ops.end(), [](const Operation& o) { return o.arity == 0; });
  }

  template <class F>
  static Label relabel(const Label& t, const F& at_var) {
    if (is_var(t)) return at_var(t.inner());
    std::vector<Label> kids;
    for (const auto& k : op_children(t)) kids.push_back(relabel(k, at_var));
    return op(op_name(t), std::move(kids));
  }

  static void collect(const Label& t, std::vector<Label>& out) {
    if (is_var(t)) {
      out.push_back(t.inner());
      return;
    }
    for (const auto& k : op_children(t)) collect(k, out);
  }

  template <class F>
  static void for_each_tuple(const std::vector<Label>& from, std::size_t n, const F& visit) {
    std::vector<Label> cur(n);
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i == n) {
        visit(cur);
        return;
      }
      for (const auto& t : from) {
        cur[i] = t;
        go(i + 1);
      }
    };
    go(0);
  }

  Signature sig_;
};

inline std::shared_ptr<const FreeMonad> term_monad(const Signature& sig) { return std::make_shared<FreeMonad>(sig); }

// --------------------------------------------------------------- F ≅ HF + A

struct BarrReport {
  bool ok = true;
  /// |terms of height ≤ d| for d = 0..depth+1.
  std::vector<std::size_t> counts;
  std::string failure;
};

/// For each d ≤ depth: terms of height ≤ d+1 are in bijection with
/// Σ_op (terms of height ≤ d)^arity + A, by counting and by an explicit
/// inverse pair.
inline BarrReport verify_barr(const Signature& sig, const FinSet& a, std::size_t depth, std::uint64_t cap = kDefaultCap) {
  FreeMonad f(sig);
  BarrReport rep;
  for (std::size_t d = 0; d <= depth; ++d) {
    auto lower = f.enumerate(a, d, cap);
    auto upper = f.enumerate(a, d + 1, cap);
    if (d == 0) rep.counts.push_back(lower.size());
    rep.counts.push_back(upper.size());
    // H(F_d) + A, elements (name, children...) or in1(a).
    std::vector<Label> side;
    for (const auto& x : a) side.push_back(Label::inj(1, x));
    std::size_t expected = a.size();
    for (const auto& o : sig.ops) {
      Count c = Count::pow(Count::of(lower.size()), Count::of(o.arity));
      if (!c.fits(cap)) fail(Errc::BudgetExceeded, "verify_barr: " + c.str() + " tuples");
      expected += static_cast<std::size_t>(c.value);
    }
    if (expected != upper.size()) {
      rep.ok = false;
      rep.failure = "height " + std::to_string(d + 1) + ": " + std::to_string(upper.size()) + " terms, H F + A has " +
                    std::to_string(expected);
      return rep;
    }
    FinSet lower_set = FinSet::from_sorted(lower);
    auto split = [&](const Label& t) {
      if (FreeMonad::is_var(t)) return Label::inj(1, t.inner());
      return Label::inj(0, t.inner());
    };
    auto join = [&](const Label& v) {
      if (v.tag() == 1) return FreeMonad::var(v.inner());
      return Label::inj(1, v.inner());
    };
    std::vector<Label> images;
    for (const auto& t : upper) {
      Label v = split(t);
      if (v.tag() == 0)
        for (const auto& k : FreeMonad::op_children(t))
          if (!lower_set.contains(k)) {
            rep.ok = false;
            rep.failure = "child " + f.pretty(k) + " is not in the lower level";
            return rep;
          }
      if (join(v) != t) {
        rep.ok = false;
        rep.failure = "round trip fails at " + f.pretty(t);
        return rep;
      }
      images.push_back(v);
    }
    if (detail::sorted_unique(images).size() != upper.size()) {
      rep.ok = false;
      rep.failure = "decomposition is not injective at height " + std::to_string(d + 1);
      return rep;
    }
  }
  return rep;
}

// ------------------------------------------------ coproducts with free monads

/// Canonical layered terms of flattened height at most `depth`, for sides
/// that are finite-valued monads or free monads.
inline std::vector<LayeredTerm> enumerate_layered(const LayeredTerms& lt, const FinSet& a, std::size_t depth,
                                                  std::uint64_t cap = kDefaultCap) {
  std::vector<LayeredTerm> level;
  for (const auto& x : a) level.push_back(LayeredTerm::var(x));
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<LayeredTerm> next;
    for (const auto& x : a) next.push_back(LayeredTerm::var(x));
    for (std::size_t p = 0; p < lt.monads().size(); ++p) {
      std::vector<LayeredTerm> pool;
      std::vector<std::size_t> heights;
      for (const auto& t : level)
        if (t.top() != p) {
          pool.push_back(t);
          heights.push_back(lt.height(t));
        }
      const MonadPtr& m = lt.monads()[p];
      auto free = std::dynamic_pointer_cast<const FreeMonad>(m);
      if (free && !m->finite_valued()) {
        // Σ-terms whose holes sit at depth k over pool terms of height ≤ budget - k.
        std::vector<std::vector<Label>> gen(d);
        for (std::size_t b = 0; b < d; ++b) {
          for (std::size_t i = 0; i < pool.size(); ++i)
            if (heights[i] <= b) gen[b].push_back(FreeMonad::var(Label::num(static_cast<std::int64_t>(i))));
          if (b > 0)
            for (const auto& o : free->signature().ops) {
              std::vector<Label> kids(o.arity);
              std::function<void(std::size_t)> go = [&](std::size_t i) {
                if (i == o.arity) {
                  gen[b].push_back(FreeMonad::op(o.name, kids));
                  return;
                }
                for (const auto& t : gen[b - 1]) {
                  kids[i] = t;
                  go(i + 1);
                }
              };
              go(0);
            }
          if (gen[b].size() > cap) fail(Errc::BudgetExceeded, "layered enumeration exceeds the cap");
        }
        for (const auto& o : free->signature().ops) {
          std::vector<Label> kids(o.arity);
          std::function<void(std::size_t)> go = [&](std::size_t i) {
            if (i == o.arity) {
              next.push_back(lt.assemble(p, FreeMonad::op(o.name, kids), pool));
              return;
            }
            for (const auto& t : gen[d - 1]) {
              kids[i] = t;
              go(i + 1);
            }
          };
          go(0);
        }
      } else {
        require(m->finite_valued(), "enumerate_layered: " + m->name() + " is neither finite-valued nor free");
        ComplementView bar(m);
        for (const auto& op : bar.carrier_at(FinSet::range(pool.size()), cap)) next.push_back(lt.assemble(p, op, pool));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    next.erase(std::remove_if(next.begin(), next.end(), [&](const LayeredTerm& t) { return lt.height(t) > d; }), next.end());
    if (next.size() > cap) fail(Errc::BudgetExceeded, "layered enumeration exceeds the cap");
    level = std::move(next);
  }
  return level;
}

/// F_Σ ⊕ T as layered terms with the free monad on the left.
inline LayeredTerms free_coproduct_terms(const MonadPtr& t, const Signature& sig) {
  return LayeredTerms({term_monad(sig), t});
}

inline std::vector<LayeredTerm> coproduct_with_free(const MonadPtr& t, const Signature& sig, const FinSet& a,
                                                    std::size_t depth) {
  return enumerate_layered(free_coproduct_terms(t, sig), a, depth);
}

/// Translation between layered terms over (F_Σ, F_Σ') and Σ+Σ'-terms.
class FreeSumTranslation {
 public:
  FreeSumTranslation(Signature left, Signature right)
      : left_(std::move(left)), right_(std::move(right)), sum_(sum_signature(left_, right_)),
        terms_({term_monad(left_), term_monad(right_)}) {
    for (std::size_t i = 0; i < left_.ops.size(); ++i) to_sum_[{0, left_.ops[i].name}] = sum_.ops[i].name;
    for (std::size_t i = 0; i < right_.ops.size(); ++i) to_sum_[{1, right_.ops[i].name}] = sum_.ops[left_.ops.size() + i].name;
    for (const auto& [k, v] : to_sum_) from_sum_[v] = k;
  }

  const Signature& sum() const { return sum_; }
  const LayeredTerms& terms() const { return terms_; }

  Label to_sum_term(const LayeredTerm& t) const {
    if (t.is_var()) return FreeMonad::var(t.value());
    auto kids = t.children();
    return rename(t.side(), t.op(), kids);
  }

  /// Maximal single-side blocks become layers.
  LayeredTerm from_sum_term(const Label& u) const {
    if (FreeMonad::is_var(u)) return LayeredTerm::var(u.inner());
    std::size_t side = from_sum_.at(FreeMonad::op_name(u)).first;
    std::vector<LayeredTerm> holes;
    std::vector<Label> hole_terms;
    Label op = block(u, side, hole_terms);
    for (const auto& h : hole_terms) holes.push_back(from_sum_term(h));
    return terms_.assemble(side, op, holes);
  }

 private:
  Label rename(std::size_t side, const Label& op, const std::vector<LayeredTerm>& kids) const {
    if (FreeMonad::is_var(op)) return to_sum_term(kids[static_cast<std::size_t>(op.inner().number())]);
    std::vector<Label> out;
    for (const auto& k : FreeMonad::op_children(op)) out.push_back(rename(side, k, kids));
    return FreeMonad::op(to_sum_.at({side, FreeMonad::op_name(op)}), std::move(out));
  }

  Label block(const Label& u, std::size_t side, std::vector<Label>& holes) const {
    if (!FreeMonad::is_var(u) && from_sum_.at(FreeMonad::op_name(u)).first == side) {
      std::vector<Label> kids;
      for (const auto& k : FreeMonad::op_children(u)) kids.push_back(block(k, side, holes));
      return FreeMonad::op(from_sum_.at(FreeMonad::op_name(u)).second, std::move(kids));
    }
    auto it = std::find(holes.begin(), holes.end(), u);
    std::size_t i = static_cast<std::size_t>(it - holes.begin());
    if (it == holes.end()) holes.push_back(u);
    return FreeMonad::var(Label::num(static_cast<std::int64_t>(i)));
  }

  Signature left_, right_, sum_;
  LayeredTerms terms_;
  std::map<std::pair<std::size_t, std::string>, std::string> to_sum_;
  std::map<std::string, std::pair<std::size_t, std::string>> from_sum_;
};

struct FreeSumReport {
  bool ok = true;
  /// Per depth: number of layered terms (equal to the number of Σ+Σ' terms).
  std::vector<std::size_t> counts;
  std::string failure;
};

/// At each depth the layered terms of F_Σ ⊕ F_Σ' and the Σ+Σ'-terms of the
/// same height correspond under the translation, both ways.
inline FreeSumReport verify_free_sum(const Signature& left, const Signature& right, const FinSet& a, std::size_t depth,
                                     std::uint64_t cap = kDefaultCap) {
  FreeSumReport rep;
  FreeSumTranslation tr(left, right);
  FreeMonad sum(tr.sum());
  for (std::size_t d = 0; d <= depth; ++d) {
    auto layered = enumerate_layered(tr.terms(), a, d, cap);
    auto plain = sum.enumerate(a, d, cap);
    rep.counts.push_back(layered.size());
    if (layered.size() != plain.size()) {
      rep.ok = false;
      rep.failure = "depth " + std::to_string(d) + ": " + std::to_string(layered.size()) + " layered terms vs " +
                    std::to_string(plain.size()) + " terms";
      return rep;
    }
    std::vector<Label> images;
    for (const auto& t : layered) {
      Label u = tr.to_sum_term(t);
      if (FreeMonad::height(u) != tr.terms().height(t) || tr.from_sum_term(u) != t) {
        rep.ok = false;
        rep.failure = "translation fails at " + tr.terms().str(t);
        return rep;
      }
      images.push_back(u);
    }
    if (detail::sorted_unique(std::move(images)) != plain) {
      rep.ok = false;
      rep.failure = "translated layered terms differ from the plain terms at depth " + std::to_string(d);
      return rep;
    }
  }
  return rep;
}

}  // namespace copro
