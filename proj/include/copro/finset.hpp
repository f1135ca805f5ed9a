#pragma once

// Finite sets, total maps, coproducts and equalizers.

#include <copro/error.hpp>
#include <copro/label.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace copro {

/// A finite set: strictly increasing sequence of labels with a hash index.
class FinSet {
 public:
  FinSet() : impl_(empty_impl()) {}

  explicit FinSet(std::vector<Label> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    impl_ = make(std::move(elems));
  }

  FinSet(std::initializer_list<Label> elems) : FinSet(std::vector<Label>(elems)) {}

  /// Caller guarantees elems is strictly increasing.
  static FinSet from_sorted(std::vector<Label> elems) {
    FinSet s;
    s.impl_ = make(std::move(elems));
    return s;
  }

  /// {0, 1, ..., n-1} as numeric atoms.
  static FinSet range(std::size_t n) {
    std::vector<Label> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(Label::num(static_cast<std::int64_t>(i)));
    return from_sorted(std::move(v));
  }

  /// {prefix0, prefix1, ...} as symbols; sorted by name, so keep n <= 10 for
  /// numeric and lexicographic order to agree.
  static FinSet symbols(std::string_view prefix, std::size_t n) {
    std::vector<Label> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(Label::sym(std::string(prefix) + std::to_string(i)));
    return FinSet(std::move(v));
  }

  std::size_t size() const noexcept { return impl_->elems.size(); }
  bool empty() const noexcept { return impl_->elems.empty(); }
  const Label& operator[](std::size_t i) const noexcept { return impl_->elems[i]; }
  auto begin() const noexcept { return impl_->elems.begin(); }
  auto end() const noexcept { return impl_->elems.end(); }
  const std::vector<Label>& elements() const noexcept { return impl_->elems; }

  bool contains(const Label& x) const { return impl_->index.contains(x); }
  std::optional<std::size_t> index_of(const Label& x) const {
    auto it = impl_->index.find(x);
    if (it == impl_->index.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const FinSet& a, const FinSet& b) {
    return a.impl_ == b.impl_ || a.impl_->elems == b.impl_->elems;
  }
  friend bool operator<(const FinSet& a, const FinSet& b) { return a.impl_->elems < b.impl_->elems; }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) out += ",";
      out += (*this)[i].str();
    }
    return out + "}";
  }

 private:
  struct Impl {
    std::vector<Label> elems;
    std::unordered_map<Label, std::size_t, LabelHash> index;
  };

  static std::shared_ptr<const Impl> make(std::vector<Label> elems) {
    auto impl = std::make_shared<Impl>();
    impl->index.reserve(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i) impl->index.emplace(elems[i], i);
    impl->elems = std::move(elems);
    return impl;
  }

  static std::shared_ptr<const Impl> empty_impl() {
    static const auto e = std::make_shared<const Impl>();
    return e;
  }

  std::shared_ptr<const Impl> impl_;
};

/// A total map between finite sets. The codomain may be left unspecified
/// when it is too large to materialize; only functors that need it ask.
class FinMap {
 public:
  using Fn = std::function<Label(const Label&)>;

  FinMap() = default;
  FinMap(FinSet dom, std::optional<FinSet> cod, Fn fn)
      : dom_(std::move(dom)), cod_(std::move(cod)), fn_(std::move(fn)) {}

  /// Images listed in dom order.
  static FinMap table(FinSet dom, std::optional<FinSet> cod, std::vector<Label> images) {
    require(images.size() == dom.size(), "FinMap::table: image count differs from domain size");
    auto imgs = std::make_shared<const std::vector<Label>>(std::move(images));
    FinSet d = dom;
    FinMap m(std::move(dom), std::move(cod), [d, imgs](const Label& x) {
      auto i = d.index_of(x);
      if (!i) fail(Errc::ContractViolation, "map applied outside its domain: " + x.str());
      return (*imgs)[*i];
    });
    m.images_ = imgs;
    return m;
  }

  static FinMap identity(const FinSet& x) {
    return table(x, x, x.elements());
  }

  /// Inclusion of a subset.
  static FinMap inclusion(const FinSet& sub, const FinSet& super) {
    for (const auto& e : sub) require(super.contains(e), "inclusion: not a subset");
    return table(sub, super, sub.elements());
  }

  Label operator()(const Label& x) const { return fn_(x); }

  const FinSet& dom() const noexcept { return dom_; }
  bool has_cod() const noexcept { return cod_.has_value(); }
  const FinSet& cod() const {
    if (!cod_) fail(Errc::ContractViolation, "map codomain was not materialized");
    return *cod_;
  }
  const Fn& fn() const noexcept { return fn_; }

  /// Images in dom order.
  std::vector<Label> images() const {
    if (images_) return *images_;
    std::vector<Label> out;
    out.reserve(dom_.size());
    for (const auto& x : dom_) out.push_back(fn_(x));
    return out;
  }

  /// Evaluates every image once and checks totality against the codomain.
  FinMap tabulated() const {
    auto imgs = images();
    if (cod_)
      for (const auto& y : imgs)
        if (!cod_->contains(y)) fail(Errc::ContractViolation, "image outside codomain: " + y.str());
    return table(dom_, cod_, std::move(imgs));
  }

  std::string str() const {
    std::string out;
    for (const auto& x : dom_) out += x.str() + " -> " + fn_(x).str() + "\n";
    return out;
  }

 private:
  FinSet dom_;
  std::optional<FinSet> cod_;
  Fn fn_ = [](const Label& x) { return x; };
  std::shared_ptr<const std::vector<Label>> images_;
};

/// g after f.
inline FinMap compose(const FinMap& g, const FinMap& f) {
  return FinMap(f.dom(), g.has_cod() ? std::optional<FinSet>(g.cod()) : std::nullopt,
                [g, f](const Label& x) { return g(f(x)); });
}

inline bool same_on_domain(const FinMap& f, const FinMap& g) {
  if (!(f.dom() == g.dom())) return false;
  for (const auto& x : f.dom())
    if (f(x) != g(x)) return false;
  return true;
}

inline bool is_injective(const FinMap& f) {
  std::unordered_map<Label, Label, LabelHash> seen;
  seen.reserve(f.dom().size());
  for (const auto& x : f.dom())
    if (!seen.emplace(f(x), x).second) return false;
  return true;
}

inline bool is_bijective(const FinMap& f) {
  if (!f.has_cod() || f.cod().size() != f.dom().size()) return false;
  if (!is_injective(f)) return false;
  for (const auto& x : f.dom())
    if (!f.cod().contains(f(x))) return false;
  return true;
}

/// Inverse of a bijection.
inline FinMap inverse(const FinMap& f) {
  if (!is_bijective(f)) fail(Errc::NotBijective, "inverse of a non-bijective map");
  std::unordered_map<Label, Label, LabelHash> back;
  for (const auto& x : f.dom()) back.emplace(f(x), x);
  std::vector<Label> imgs;
  for (const auto& y : f.cod()) imgs.push_back(back.at(y));
  return FinMap::table(f.cod(), f.dom(), std::move(imgs));
}

/// Saturating cardinal arithmetic for sizes that may not fit in 64 bits.
struct Count {
  std::uint64_t value = 0;
  bool saturated = false;

  static Count of(std::uint64_t v) { return Count{v, false}; }
  static Count huge() { return Count{std::numeric_limits<std::uint64_t>::max(), true}; }

  friend Count operator+(Count a, Count b) {
    if (a.saturated || b.saturated || a.value > std::numeric_limits<std::uint64_t>::max() - b.value)
      return huge();
    return of(a.value + b.value);
  }
  friend Count operator*(Count a, Count b) {
    if ((a.value == 0 && !a.saturated) || (b.value == 0 && !b.saturated)) return of(0);
    if (a.saturated || b.saturated || a.value > std::numeric_limits<std::uint64_t>::max() / b.value)
      return huge();
    return of(a.value * b.value);
  }
  /// Assumes b <= a for exact values.
  friend Count operator-(Count a, Count b) {
    if (a.saturated) return huge();
    require(!b.saturated && b.value <= a.value, "Count subtraction underflow");
    return of(a.value - b.value);
  }
  static Count pow(Count base, Count exp) {
    if (exp.value == 0 && !exp.saturated) return of(1);
    if (!base.saturated && base.value <= 1) return base;
    if (exp.saturated) return huge();
    Count r = of(1);
    for (std::uint64_t i = 0; i < exp.value; ++i) {
      r = r * base;
      if (r.saturated) return r;
    }
    return r;
  }
  friend bool operator==(const Count&, const Count&) = default;
  bool fits(std::uint64_t cap) const { return !saturated && value <= cap; }
  std::string str() const { return saturated ? std::string(">=2^64") : std::to_string(value); }
};

/// Tagged disjoint union of a family; element x of summand k becomes in_k(x).
struct Sum {
  FinSet set;
  std::vector<FinMap> injections;
};

inline Sum sum(const std::vector<FinSet>& parts) {
  std::vector<Label> elems;
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (const auto& x : parts[k]) elems.push_back(Label::inj(static_cast<std::int64_t>(k), x));
  // Tags ascend and each part is sorted, so elems is already increasing.
  Sum out{FinSet::from_sorted(std::move(elems)), {}};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto tag = static_cast<std::int64_t>(k);
    out.injections.emplace_back(parts[k], out.set, [tag](const Label& x) { return Label::inj(tag, x); });
  }
  return out;
}

struct Coproduct {
  FinSet set;
  FinMap inl;
  FinMap inr;
};

inline Coproduct coproduct(const FinSet& x, const FinSet& y) {
  Sum s = sum({x, y});
  return {s.set, s.injections[0], s.injections[1]};
}

/// [f_0, ..., f_n] out of a tagged sum.
inline FinMap copair(const FinSet& sum_set, std::vector<FinMap> legs, std::optional<FinSet> cod = std::nullopt) {
  auto shared = std::make_shared<const std::vector<FinMap>>(std::move(legs));
  return FinMap(sum_set, std::move(cod), [shared](const Label& x) {
    require(x.is(Label::Kind::Inj) && x.tag() >= 0 && static_cast<std::size_t>(x.tag()) < shared->size(),
            "copair: not a tagged element " + x.str());
    return (*shared)[static_cast<std::size_t>(x.tag())](x.inner());
  });
}

struct Equalizer {
  FinSet set;
  FinMap inclusion;
};

inline Equalizer equalizer(const FinMap& f, const FinMap& g) {
  require(f.dom() == g.dom(), "equalizer: domains differ");
  require(!f.has_cod() || !g.has_cod() || f.cod() == g.cod(), "equalizer: codomains differ");
  std::vector<Label> elems;
  for (const auto& x : f.dom())
    if (f(x) == g(x)) elems.push_back(x);
  FinSet e = FinSet::from_sorted(std::move(elems));
  return {e, FinMap::inclusion(e, f.dom())};
}

/// Calls visit(images) for every map dom -> cod in lexicographic order of
/// image indices; visit returns false to stop. Fails with BudgetExceeded when
/// |cod|^|dom| exceeds the bound.
template <class Visit>
void for_each_map(const FinSet& dom, const FinSet& cod, Visit&& visit, std::uint64_t bound = 1'000'000) {
  Count total = Count::pow(Count::of(cod.size()), Count::of(dom.size()));
  if (!total.fits(bound)) fail(Errc::BudgetExceeded, "function space too large: " + total.str());
  if (cod.empty() && !dom.empty()) return;
  std::vector<std::size_t> idx(dom.size(), 0);
  std::vector<Label> imgs(dom.size(), cod.empty() ? Label() : cod[0]);
  while (true) {
    if (!visit(FinMap::table(dom, cod, imgs))) return;
    std::size_t i = dom.size();
    while (i > 0) {
      --i;
      if (++idx[i] < cod.size()) {
        imgs[i] = cod[idx[i]];
        break;
      }
      idx[i] = 0;
      imgs[i] = cod[0];
      if (i == 0) return;
    }
    if (dom.empty()) return;
  }
}

/// Calls visit(m) for every injection dom -> cod.
template <class Visit>
void for_each_injection(const FinSet& dom, const FinSet& cod, Visit&& visit) {
  if (dom.size() > cod.size()) return;
  std::vector<std::size_t> pick;
  std::vector<bool> used(cod.size(), false);
  std::function<bool()> rec = [&]() -> bool {
    if (pick.size() == dom.size()) {
      std::vector<Label> imgs;
      for (auto i : pick) imgs.push_back(cod[i]);
      return visit(FinMap::table(dom, cod, std::move(imgs)));
    }
    for (std::size_t i = 0; i < cod.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      pick.push_back(i);
      bool go = rec();
      pick.pop_back();
      used[i] = false;
      if (!go) return false;
    }
    return true;
  };
  rec();
}

/// First bijection x -> y (in lexicographic permutation order) satisfying the
/// constraint, or nullopt. Exhaustive; sizes above `bound` fail with
/// BudgetExceeded.
inline std::optional<FinMap> search_bijection(const FinSet& x, const FinSet& y,
                                              const std::function<bool(const FinMap&)>& constraint,
                                              std::size_t bound = 8) {
  if (x.size() != y.size()) return std::nullopt;
  if (x.size() > bound) fail(Errc::BudgetExceeded, "bijection search above bound " + std::to_string(bound));
  std::vector<std::size_t> perm(x.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  do {
    std::vector<Label> imgs;
    for (auto i : perm) imgs.push_back(y[i]);
    FinMap candidate = FinMap::table(x, y, std::move(imgs));
    if (constraint(candidate)) return candidate;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

}  // namespace copro
