#pragma once

// The unit complement S̄X = SX \ ran(η_X), its action on injections, and
// least supports.

#include <copro/monad.hpp>

namespace copro {

inline bool is_unit_element(const MonadSpec& s, const Label& e) { return s.unit_preimage(e).has_value(); }

class ComplementView {
 public:
  explicit ComplementView(MonadPtr base) : base_(std::move(base)) {}

  const MonadSpec& base() const { return *base_; }
  const MonadPtr& base_ptr() const { return base_; }

  Count card(std::size_t n) const {
    Count c = base_->card(n);
    if (c.saturated) return c;
    return c - Count::of(n);
  }

  FinSet carrier_at(const FinSet& x, std::uint64_t cap = kDefaultCap) const {
    if (!card(x.size()).fits(cap))
      fail(Errc::BudgetExceeded, "complement of " + base_->name() + " at a " + std::to_string(x.size()) +
                                     "-element set has " + card(x.size()).str() + " elements");
    std::vector<Label> out;
    for (const auto& s : base_->carrier(x, cap + x.size()))
      if (!is_unit_element(*base_, s)) out.push_back(s);
    return FinSet::from_sorted(std::move(out));
  }

  /// Restriction of S(m) to S̄X, for injective m.
  FinMap action_on_injection(const FinMap& m, std::uint64_t cap = kDefaultCap) const {
    if (!is_injective(m)) fail(Errc::NotInjective, "complement acts only on injections");
    FinSet dom = carrier_at(m.dom(), cap);
    std::optional<FinSet> cod;
    if (m.has_cod()) cod = carrier_at(m.cod(), cap);
    MonadPtr b = base_;
    return FinMap(dom, cod, [b, m](const Label& s) { return b->map(m, s); });
  }

 private:
  MonadPtr base_;
};

inline ComplementView complement(const MonadPtr& s) {
  if (classify_consistency(*s) != Consistency::Consistent)
    fail(Errc::InconsistentMonad, s->name() + " is inconsistent; its complement is not a subfunctor");
  return ComplementView(s);
}

/// S(m)(s) for s ∈ S̄X and injective m, checked to land outside the units.
inline Label complement_action(const ComplementView& view, const FinMap& m, const Label& s) {
  if (!is_injective(m)) fail(Errc::NotInjective, "complement acts only on injections");
  require(!is_unit_element(view.base(), s), "complement_action: " + s.str() + " is a unit element");
  Label out = view.base().map(m, s);
  if (is_unit_element(view.base(), out))
    fail(Errc::SubfunctorViolation, "image of " + s.str() + " is a unit element " + out.str());
  return out;
}

struct SupportOptions {
  /// Above this many candidates the search shrinks greedily instead.
  std::size_t exhaustive_limit = 10;
};

namespace detail {

/// Is s in the range of S(U ⊆ n)? Tested via the retraction n -> U that
/// fixes U and sends the rest to the least element of U.
inline bool supported_by(const MonadSpec& s, const FinSet& n, const std::vector<Label>& u, const Label& e) {
  if (u.empty()) {
    for (const auto& c : s.carrier(FinSet{}))
      if (s.map(FinMap(FinSet{}, n, [](const Label& x) { return x; }), c) == e) return true;
    return false;
  }
  FinSet uset = FinSet::from_sorted(u);
  FinMap r(n, n, [&uset, &u](const Label& x) { return uset.contains(x) ? x : u.front(); });
  return s.map(r, e) == e;
}

}  // namespace detail

/// The least U ⊆ n with e ∈ ran S(U ⊆ n). Subsets are tried by size, then in
/// label order; a second subset of the least size that also works raises
/// AmbiguousSupport. Monads with a structural notion of support supply it
/// directly.
inline std::vector<Label> minimal_support(const MonadSpec& s, const FinSet& n, const Label& e,
                                          const SupportOptions& opt = {}) {
  if (auto direct = s.support_override(e)) return *direct;
  const bool small = n.size() <= opt.exhaustive_limit;
  // On large sets only the elements e mentions are candidates.
  std::vector<Label> cand;
  if (small) {
    cand = n.elements();
  } else {
    for (const auto& x : s.occurring(e))
      if (n.contains(x)) cand.push_back(x);
  }
  const std::size_t k = cand.size();
  if (k > opt.exhaustive_limit) {
    std::vector<Label> u = cand;
    for (std::size_t i = 0; i < u.size();) {
      std::vector<Label> smaller = u;
      smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(i));
      if (detail::supported_by(s, n, smaller, e)) u = std::move(smaller);
      else ++i;
    }
    return u;
  }
  for (std::size_t size = 0; size <= k; ++size) {
    std::optional<std::vector<Label>> found;
    std::vector<bool> mask(k, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(size), true);
    // prev_permutation walks subsets of this size in lexicographic order.
    do {
      std::vector<Label> u;
      for (std::size_t i = 0; i < k; ++i)
        if (mask[i]) u.push_back(cand[i]);
      if (detail::supported_by(s, n, u, e)) {
        if (found)
          fail(Errc::AmbiguousSupport, e.str() + " is supported by both " + Label::set(*found).str() + " and " +
                                           Label::set(u).str());
        found = std::move(u);
      }
    } while (std::prev_permutation(mask.begin(), mask.end()));
    if (found) return *found;
  }
  if (!small && k == 0) {
    // Nothing mentioned and nothing from ∅: any singleton will do.
    std::optional<std::vector<Label>> found;
    for (std::size_t i = 0; i < std::min<std::size_t>(n.size(), 2); ++i)
      if (detail::supported_by(s, n, {n[i]}, e)) {
        if (found)
          fail(Errc::AmbiguousSupport, e.str() + " is supported by both " + found->front().str() + " and " +
                                           n[i].str());
        found = std::vector<Label>{n[i]};
      }
    if (found) return *found;
  }
  // Only reachable when e is not an element of S n at all.
  fail(Errc::ContractViolation, s.name() + ": no support found for " + e.str());
}

}  // namespace copro
