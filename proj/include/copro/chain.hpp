#pragma once

// Initial chains of equation systems over families of finite sets and
// injections, with convergence detection, canonical cocones and the induced
// recursion into algebras of the un-barred system.

#include <copro/complement.hpp>
#include <copro/monad.hpp>

#include <memory>
#include <string>
#include <vector>

namespace copro {

/// A functor expression in the sort variables: sorts, constant sets, tagged
/// sums and monad applications (complement or full).
class Expr {
 public:
  enum class Kind { Sort, Const, Sum, Apply };

  static Expr sort(std::size_t i) { return Expr(Node{Kind::Sort, i, {}, {}, nullptr, false}); }
  static Expr constant(FinSet s) { return Expr(Node{Kind::Const, 0, std::move(s), {}, nullptr, false}); }
  /// Summand k is tagged in_k; a single summand stays untagged.
  static Expr sum(std::vector<Expr> terms) {
    if (terms.size() == 1) return terms.front();
    std::vector<std::pair<std::int64_t, Expr>> tagged;
    for (std::size_t k = 0; k < terms.size(); ++k) tagged.emplace_back(static_cast<std::int64_t>(k), terms[k]);
    return tagged_sum(std::move(tagged));
  }
  /// Explicit, strictly increasing tags.
  static Expr tagged_sum(std::vector<std::pair<std::int64_t, Expr>> terms) {
    for (std::size_t k = 1; k < terms.size(); ++k) require(terms[k - 1].first < terms[k].first, "sum tags must increase");
    return Expr(Node{Kind::Sum, 0, {}, std::move(terms), nullptr, false});
  }
  /// S̄(e).
  static Expr bar(MonadPtr m, Expr e) { return apply(std::move(m), std::move(e), true); }
  /// S(e).
  static Expr full(MonadPtr m, Expr e) { return apply(std::move(m), std::move(e), false); }

  Kind kind() const { return node_->kind; }
  std::size_t sort_index() const { return node_->index; }
  const FinSet& set() const { return node_->set; }
  const std::vector<std::pair<std::int64_t, Expr>>& terms() const { return node_->terms; }
  const MonadPtr& monad() const { return node_->monad; }
  bool barred() const { return node_->barred; }
  const Expr& arg() const { return node_->terms.front().second; }

  /// The same expression with every complement replaced by the full monad.
  Expr unbarred() const {
    switch (kind()) {
      case Kind::Sort:
      case Kind::Const: return *this;
      case Kind::Sum: {
        std::vector<std::pair<std::int64_t, Expr>> t;
        for (const auto& [tag, e] : terms()) t.emplace_back(tag, e.unbarred());
        return tagged_sum(std::move(t));
      }
      case Kind::Apply: return full(monad(), arg().unbarred());
    }
    return *this;
  }

  std::string str(const std::vector<std::string>& sort_names = {}) const {
    switch (kind()) {
      case Kind::Sort:
        return sort_index() < sort_names.size() ? sort_names[sort_index()] : "X" + std::to_string(sort_index());
      case Kind::Const: return "[" + std::to_string(set().size()) + "]";
      case Kind::Sum: {
        std::string out;
        for (const auto& [tag, e] : terms()) out += (out.empty() ? "" : " + ") + e.str(sort_names);
        return "(" + out + ")";
      }
      case Kind::Apply: return (barred() ? "bar " : "") + monad()->name() + " " + arg().str(sort_names);
    }
    return "?";
  }

 private:
  struct Node {
    Kind kind;
    std::size_t index;
    FinSet set;
    std::vector<std::pair<std::int64_t, Expr>> terms;
    MonadPtr monad;
    bool barred;
  };

  static Expr apply(MonadPtr m, Expr e, bool barred) {
    std::vector<std::pair<std::int64_t, Expr>> t;
    t.emplace_back(0, std::move(e));
    return Expr(Node{Kind::Apply, 0, {}, std::move(t), std::move(m), barred});
  }

  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  std::shared_ptr<const Node> node_;
};

struct EquationSystem {
  std::vector<std::string> sorts;
  std::vector<Expr> rhs;

  std::size_t size() const { return rhs.size(); }
  std::string str() const {
    std::string out;
    for (std::size_t p = 0; p < rhs.size(); ++p) out += sorts[p] + " = " + rhs[p].str(sorts) + "\n";
    return out;
  }
};

struct ChainOptions {
  std::size_t budget = 16;
  std::uint64_t cap = kDefaultCap;
};

/// Per-sort cardinality of the right-hand side given per-sort sizes.
inline Count eval_card(const Expr& e, const std::vector<Count>& sizes) {
  switch (e.kind()) {
    case Expr::Kind::Sort: return sizes[e.sort_index()];
    case Expr::Kind::Const: return Count::of(e.set().size());
    case Expr::Kind::Sum: {
      Count c = Count::of(0);
      for (const auto& [tag, t] : e.terms()) c = c + eval_card(t, sizes);
      return c;
    }
    case Expr::Kind::Apply: {
      Count inner = eval_card(e.arg(), sizes);
      if (inner.saturated) return Count::huge();
      Count full = e.monad()->card(static_cast<std::size_t>(inner.value));
      if (!e.barred() || full.saturated) return full;
      return full - inner;
    }
  }
  return Count::huge();
}

/// The right-hand side evaluated on a family of sets.
inline FinSet eval_set(const Expr& e, const std::vector<FinSet>& sorts, std::uint64_t cap = kDefaultCap) {
  switch (e.kind()) {
    case Expr::Kind::Sort: return sorts[e.sort_index()];
    case Expr::Kind::Const: return e.set();
    case Expr::Kind::Sum: {
      std::vector<Label> out;
      for (const auto& [tag, t] : e.terms())
        for (const auto& x : eval_set(t, sorts, cap)) out.push_back(Label::inj(tag, x));
      return FinSet::from_sorted(std::move(out));
    }
    case Expr::Kind::Apply: {
      FinSet inner = eval_set(e.arg(), sorts, cap);
      if (!e.barred()) return e.monad()->carrier(inner, cap);
      return ComplementView(e.monad()).carrier_at(inner, cap);
    }
  }
  return {};
}

/// The right-hand side's action on a family of maps, element by element.
inline FinMap::Fn eval_fn(const Expr& e, const std::vector<FinMap::Fn>& maps) {
  switch (e.kind()) {
    case Expr::Kind::Sort: return maps[e.sort_index()];
    case Expr::Kind::Const: return [](const Label& x) { return x; };
    case Expr::Kind::Sum: {
      std::vector<std::pair<std::int64_t, FinMap::Fn>> legs;
      for (const auto& [tag, t] : e.terms()) legs.emplace_back(tag, eval_fn(t, maps));
      return [legs](const Label& x) {
        for (const auto& [tag, f] : legs)
          if (tag == x.tag()) return Label::inj(tag, f(x.inner()));
        fail(Errc::ContractViolation, "untagged element " + x.str() + " in a sum");
      };
    }
    case Expr::Kind::Apply: {
      auto inner = eval_fn(e.arg(), maps);
      MonadPtr m = e.monad();
      return [m, inner](const Label& s) { return apply_fn(*m, inner, s); };
    }
  }
  return nullptr;
}

struct ChainStage {
  std::vector<Count> sizes;
  /// Present when the stage was materialized.
  std::optional<std::vector<FinSet>> carriers;
};

struct ChainState {
  EquationSystem system;
  std::vector<ChainStage> stages;
  /// connectors[i][p] : stage i -> stage i+1 at sort p.
  std::vector<std::vector<FinMap>> connectors;

  const std::vector<FinSet>& carriers(std::size_t i) const {
    require(stages.at(i).carriers.has_value(), "stage " + std::to_string(i) + " was not materialized");
    return *stages[i].carriers;
  }
};

struct SolutionPair {
  std::vector<FinSet> carriers;
  /// structure[p] : H_p(carriers) -> carriers[p], a bijection.
  std::vector<FinMap> structure;
  std::size_t converged_at = 0;
};

struct ChainResult {
  ChainState chain;
  std::optional<SolutionPair> solution;
  /// Why the run stopped short of convergence.
  std::string reason;

  bool converged() const { return solution.has_value(); }
  /// Per stage, per sort sizes (exact or saturated).
  std::vector<std::vector<Count>> trace() const {
    std::vector<std::vector<Count>> out;
    for (const auto& s : chain.stages) out.push_back(s.sizes);
    return out;
  }
};

/// Runs 0 -> H0 -> H²0 -> ... and stops at the first stage whose connecting
/// injections are all bijective, or when the budget or materialization cap is
/// reached. Sizes keep being counted past the cap so the trace covers every
/// stage up to the budget.
inline ChainResult run_chain(const EquationSystem& sys, const ChainOptions& opt = {}) {
  require(opt.budget >= 1, "run_chain: budget must be positive");
  require(sys.sorts.size() == sys.rhs.size(), "run_chain: one right-hand side per sort");
  const std::size_t n = sys.size();
  ChainResult res;
  res.chain.system = sys;
  res.chain.stages.push_back({std::vector<Count>(n, Count::of(0)), std::vector<FinSet>(n)});
  std::vector<FinMap::Fn> prev_conn(n, [](const Label& x) -> Label {
    fail(Errc::ContractViolation, "no element at stage 0: " + x.str());
  });

  bool materializing = true;
  for (std::size_t i = 0; i <= opt.budget; ++i) {
    const ChainStage& cur = res.chain.stages[i];
    ChainStage next;
    for (const auto& e : sys.rhs) next.sizes.push_back(eval_card(e, cur.sizes));
    if (materializing) {
      for (const auto& c : next.sizes)
        if (!c.fits(opt.cap)) materializing = false;
      if (materializing) {
        try {
          std::vector<FinSet> sets;
          for (const auto& e : sys.rhs) sets.push_back(eval_set(e, *cur.carriers, opt.cap));
          next.carriers = std::move(sets);
        } catch (const Error& err) {
          if (err.code() != Errc::BudgetExceeded) throw;
          materializing = false;
        }
      }
      if (!materializing) {
        std::string sizes;
        for (const auto& c : next.sizes) sizes += (sizes.empty() ? "" : ", ") + c.str();
        res.reason = "stage " + std::to_string(i + 1) + " exceeds the materialization cap (sizes " + sizes + ")";
      }
    }
    res.chain.stages.push_back(std::move(next));
    if (!materializing) continue;

    const auto& from = res.chain.carriers(i);
    const auto& to = res.chain.carriers(i + 1);
    std::vector<FinMap> conn;
    bool all_bijective = true;
    for (std::size_t p = 0; p < n; ++p) {
      FinMap raw(from[p], to[p], eval_fn(sys.rhs[p], prev_conn));
      auto imgs = raw.images();
      for (const auto& y : imgs)
        if (!to[p].contains(y))
          fail(Errc::SubfunctorViolation, "connector image " + y.str() + " lies outside stage " +
                                              std::to_string(i + 1) + " at " + sys.sorts[p]);
      FinMap h = FinMap::table(from[p], to[p], std::move(imgs));
      if (!is_injective(h))
        fail(Errc::SubfunctorViolation, "connector " + std::to_string(i) + "->" + std::to_string(i + 1) + " at " +
                                            sys.sorts[p] + " is not injective");
      all_bijective = all_bijective && h.dom().size() == h.cod().size();
      conn.push_back(std::move(h));
    }
    res.chain.connectors.push_back(conn);
    if (all_bijective) {
      SolutionPair sol;
      sol.carriers = from;
      for (const auto& h : conn) sol.structure.push_back(inverse(h));
      sol.converged_at = i;
      res.solution = std::move(sol);
      res.reason.clear();
      return res;
    }
    prev_conn.clear();
    for (const auto& h : conn) prev_conn.push_back(h.fn());
  }
  if (res.reason.empty()) res.reason = "no bijective connector within budget " + std::to_string(opt.budget);
  return res;
}

/// An algebra for the un-barred system: per sort a carrier and a structure
/// map G_p(B) -> B_p, given element-wise.
struct GAlgebra {
  std::vector<FinSet> carriers;
  std::vector<FinMap::Fn> structure;
};

/// c_0 = ∅ -> B and c_{j+1} = φ ∘ G(c_j) on H^{j+1}0 ⊆ G(H^j 0), for every
/// materialized stage up to `upto`. Throws if some c_{j+1} ∘ h_{j,j+1} ≠ c_j.
inline std::vector<std::vector<FinMap>> canonical_cocone(const ChainState& chain, const GAlgebra& target,
                                                         std::size_t upto) {
  const std::size_t n = chain.system.size();
  std::vector<std::vector<FinMap>> out;
  std::vector<FinMap> c0;
  for (std::size_t p = 0; p < n; ++p) c0.push_back(FinMap::table(FinSet{}, target.carriers[p], {}));
  out.push_back(std::move(c0));
  for (std::size_t j = 0; j < upto; ++j) {
    std::vector<FinMap::Fn> prev;
    for (const auto& c : out.back()) prev.push_back(c.fn());
    const auto& stage = chain.carriers(j + 1);
    std::vector<FinMap> cj;
    for (std::size_t p = 0; p < n; ++p) {
      FinMap::Fn g = eval_fn(chain.system.rhs[p].unbarred(), prev);
      const FinMap::Fn& phi = target.structure[p];
      FinMap c = FinMap(stage[p], target.carriers[p], [g, phi](const Label& x) { return phi(g(x)); }).tabulated();
      const FinMap& h = chain.connectors.at(j)[p];
      for (const auto& x : h.dom())
        if (c(h(x)) != out.back()[p](x))
          fail(Errc::ContractViolation, "cocone does not commute at stage " + std::to_string(j) + " on " + x.str());
      cj.push_back(std::move(c));
    }
    out.push_back(std::move(cj));
  }
  return out;
}

/// The unique H-G-algebra morphism from the solution into the target: the
/// cocone component at the convergence stage.
inline std::vector<FinMap> recurse(const ChainResult& res, const GAlgebra& target) {
  if (!res.converged()) fail(Errc::NoConvergence, "recurse needs a converged chain");
  return canonical_cocone(res.chain, target, res.solution->converged_at).back();
}

/// f ∘ structure = φ ∘ G(f) on every element of H(X).
inline bool is_hg_morphism(const EquationSystem& sys, const SolutionPair& sol, const GAlgebra& target,
                           const std::vector<FinMap>& f) {
  std::vector<FinMap::Fn> fs;
  for (const auto& m : f) fs.push_back(m.fn());
  for (std::size_t p = 0; p < sys.size(); ++p) {
    FinMap::Fn g = eval_fn(sys.rhs[p].unbarred(), fs);
    for (const auto& y : sol.structure[p].dom())
      if (f[p](sol.structure[p](y)) != target.structure[p](g(y))) return false;
  }
  return true;
}

}  // namespace copro
