#pragma once

// Computable monads on finite sets.
//
// Elements of SX are labels. Every implementation here is label-stable: the
// action of an inclusion X ⊆ Y leaves labels unchanged, so unit and
// multiplication are functions of the element alone and the map action only
// consults f on the elements an element mentions (`occurring`).

#include <copro/error.hpp>
#include <copro/finset.hpp>
#include <copro/label.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace copro {

inline constexpr std::uint64_t kDefaultCap = 1u << 18;

class MonadSpec;
using MonadPtr = std::shared_ptr<const MonadSpec>;

class MonadSpec : public std::enable_shared_from_this<MonadSpec> {
 public:
  virtual ~MonadSpec() = default;

  virtual std::string name() const = 0;
  /// False for term monads, whose carriers are infinite.
  virtual bool finite_valued() const { return true; }
  /// False for plain functors (no unit or multiplication).
  virtual bool has_structure() const { return true; }

  /// |S n| for an n-element set; saturates when unknown or infinite.
  virtual Count card(std::size_t n) const = 0;

  /// SX, cached per X. Fails with BudgetExceeded above the cap.
  FinSet carrier(const FinSet& x, std::uint64_t cap = kDefaultCap) const {
    {
      std::lock_guard lock(cache_mutex_);
      if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    }
    Count c = card(x.size());
    if (!c.fits(cap))
      fail(Errc::BudgetExceeded, name() + " carrier at a " + std::to_string(x.size()) + "-element set has " +
                                     c.str() + " elements");
    FinSet out = make_carrier(x);
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(x, out);
    return out;
  }

  virtual Label map(const FinMap& f, const Label& s) const = 0;
  virtual Label unit(const Label& x) const {
    (void)x;
    fail(Errc::NotAMonad, name() + " has no unit");
  }
  virtual Label mult(const Label& w) const {
    (void)w;
    fail(Errc::NotAMonad, name() + " has no multiplication");
  }
  /// x with unit(x) = s, if s is a unit element.
  virtual std::optional<Label> unit_preimage(const Label& s) const = 0;
  /// The elements of the underlying set mentioned by s, sorted.
  virtual std::vector<Label> occurring(const Label& s) const = 0;
  /// Least support when it is read off structurally rather than searched.
  virtual std::optional<std::vector<Label>> support_override(const Label& s) const {
    (void)s;
    return std::nullopt;
  }
  /// Height of a layer whose op is s once variables are replaced by subtrees
  /// of the given heights. One layer counts as one level.
  virtual std::size_t layer_height(const Label& s, const std::function<std::size_t(const Label&)>& height) const {
    std::size_t h = 0;
    for (const auto& x : occurring(s)) h = std::max(h, height(x));
    return h + 1;
  }

  /// mult ∘ S(f) for f : X -> SY.
  Label bind(const FinMap& f, const Label& t) const { return mult(map(f, t)); }

  /// S(f) as a map SX -> SY, tabulated over the carrier.
  FinMap action(const FinMap& f, std::uint64_t cap = kDefaultCap) const {
    FinSet dom = carrier(f.dom(), cap);
    std::optional<FinSet> cod;
    if (f.has_cod() && card(f.cod().size()).fits(cap)) cod = carrier(f.cod(), cap);
    std::vector<Label> imgs;
    imgs.reserve(dom.size());
    for (const auto& s : dom) imgs.push_back(map(f, s));
    return FinMap::table(dom, cod, std::move(imgs));
  }

 protected:
  virtual FinSet make_carrier(const FinSet& x) const = 0;

 private:
  mutable std::mutex cache_mutex_;
  mutable std::map<FinSet, FinSet> cache_;
};

/// A map X -> Y evaluated lazily; only its graph on demand matters.
inline FinMap lazy_map(std::vector<Label> dom, FinMap::Fn fn) {
  return FinMap(FinSet(std::move(dom)), std::nullopt, std::move(fn));
}

/// S(f) on a single element, with f given as a plain function.
inline Label apply_fn(const MonadSpec& s, const FinMap::Fn& f, const Label& x) {
  return s.map(lazy_map(s.occurring(x), f), x);
}

namespace detail {

inline std::vector<Label> sorted_unique(std::vector<Label> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------- builtins

/// X + E. Values are in0(x) and in1(e). The zero variant sends ∅ to ∅.
class ExceptionMonad final : public MonadSpec {
 public:
  ExceptionMonad(std::string name, FinSet errors, bool zero)
      : name_(std::move(name)), errors_(std::move(errors)), zero_(zero) {}

  std::string name() const override { return name_; }
  const FinSet& errors() const { return errors_; }
  bool zero() const { return zero_; }

  Count card(std::size_t n) const override {
    if (zero_ && n == 0) return Count::of(0);
    return Count::of(n + errors_.size());
  }
  Label map(const FinMap& f, const Label& s) const override {
    if (s.tag() == 0) return Label::inj(0, f(s.inner()));
    return s;
  }
  Label unit(const Label& x) const override { return Label::inj(0, x); }
  Label mult(const Label& w) const override { return w.tag() == 0 ? w.inner() : w; }
  std::optional<Label> unit_preimage(const Label& s) const override {
    if (s.is(Label::Kind::Inj) && s.tag() == 0) return s.inner();
    return std::nullopt;
  }
  std::vector<Label> occurring(const Label& s) const override {
    if (s.tag() == 0) return {s.inner()};
    return {};
  }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    if (zero_ && x.empty()) return {};
    std::vector<Label> v;
    for (const auto& a : x) v.push_back(Label::inj(0, a));
    for (const auto& e : errors_) v.push_back(Label::inj(1, e));
    return FinSet::from_sorted(std::move(v));
  }

 private:
  std::string name_;
  FinSet errors_;
  bool zero_;
};

/// X ↦ 1, optionally with ∅ ↦ ∅.
class TerminalMonad final : public MonadSpec {
 public:
  explicit TerminalMonad(bool zero) : zero_(zero) {}
  std::string name() const override { return zero_ ? "terminal0" : "terminal"; }
  Count card(std::size_t n) const override { return Count::of(zero_ && n == 0 ? 0 : 1); }
  Label map(const FinMap&, const Label&) const override { return star(); }
  Label unit(const Label&) const override { return star(); }
  Label mult(const Label&) const override { return star(); }
  std::optional<Label> unit_preimage(const Label&) const override { return std::nullopt; }
  std::vector<Label> occurring(const Label&) const override { return {}; }
  static Label star() { return Label::sym("*"); }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    if (zero_ && x.empty()) return {};
    return FinSet{star()};
  }

 private:
  bool zero_;
};

/// Finite powerset; also the functor P_A (sets of admissible size or empty,
/// images taken only along injective restrictions), which has no monad
/// structure.
class PowersetMonad final : public MonadSpec {
 public:
  PowersetMonad() = default;
  explicit PowersetMonad(std::vector<std::size_t> admissible) : restricted_(true), admissible_(std::move(admissible)) {
    std::sort(admissible_.begin(), admissible_.end());
    admissible_.erase(std::unique(admissible_.begin(), admissible_.end()), admissible_.end());
  }

  std::string name() const override {
    if (!restricted_) return "powerset";
    std::string out = "pA:";
    for (std::size_t i = 0; i < admissible_.size(); ++i) out += (i ? "," : "") + std::to_string(admissible_[i]);
    return out;
  }
  bool has_structure() const override { return !restricted_; }

  Count card(std::size_t n) const override {
    if (!restricted_) return Count::pow(Count::of(2), Count::of(n));
    Count c = Count::of(1);  // the empty set
    for (auto k : admissible_)
      if (k > 0 && k <= n) c = c + binomial(n, k);
    return c;
  }
  Label map(const FinMap& f, const Label& s) const override {
    std::vector<Label> img;
    img.reserve(s.size());
    for (const auto& x : s.children()) img.push_back(f(x));
    Label out = Label::set(img);
    if (restricted_ && out.size() != s.size()) return Label::set({});
    return out;
  }
  Label unit(const Label& x) const override {
    if (restricted_) return MonadSpec::unit(x);
    return Label::set_from_sorted({x});
  }
  Label mult(const Label& w) const override {
    if (restricted_) return MonadSpec::mult(w);
    std::vector<Label> all;
    for (const auto& s : w.children())
      for (const auto& x : s.children()) all.push_back(x);
    return Label::set(std::move(all));
  }
  std::optional<Label> unit_preimage(const Label& s) const override {
    if (!restricted_ && s.is(Label::Kind::Set) && s.size() == 1) return s[0];
    return std::nullopt;
  }
  std::vector<Label> occurring(const Label& s) const override {
    return {s.children().begin(), s.children().end()};
  }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    const std::size_t n = x.size();
    std::vector<Label> out;
    std::vector<Label> cur;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      cur.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) cur.push_back(x[i]);
      if (restricted_ && !cur.empty() && !std::binary_search(admissible_.begin(), admissible_.end(), cur.size()))
        continue;
      out.push_back(Label::set_from_sorted(cur));
    }
    return FinSet(std::move(out));
  }

 private:
  static Count binomial(std::size_t n, std::size_t k) {
    Count c = Count::of(1);
    for (std::size_t i = 0; i < k; ++i) {
      c = c * Count::of(n - i);
      if (c.saturated) return c;
      c.value /= (i + 1);
    }
    return c;
  }

  bool restricted_ = false;
  std::vector<std::size_t> admissible_;
};

/// X ↦ X^k. Multiplication takes the diagonal.
class ReaderMonad final : public MonadSpec {
 public:
  explicit ReaderMonad(std::size_t k) : k_(k) { require(k >= 1, "reader needs a nonempty environment"); }
  std::string name() const override { return "reader:" + std::to_string(k_); }
  Count card(std::size_t n) const override { return Count::pow(Count::of(n), Count::of(k_)); }
  Label map(const FinMap& f, const Label& s) const override {
    std::vector<Label> v;
    for (const auto& x : s.children()) v.push_back(f(x));
    return Label::tuple(std::move(v));
  }
  Label unit(const Label& x) const override { return Label::tuple(std::vector<Label>(k_, x)); }
  Label mult(const Label& w) const override {
    std::vector<Label> v;
    for (std::size_t i = 0; i < k_; ++i) v.push_back(w[i][i]);
    return Label::tuple(std::move(v));
  }
  std::optional<Label> unit_preimage(const Label& s) const override {
    for (const auto& x : s.children())
      if (x != s[0]) return std::nullopt;
    return s[0];
  }
  std::vector<Label> occurring(const Label& s) const override {
    return detail::sorted_unique({s.children().begin(), s.children().end()});
  }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    std::vector<Label> out;
    if (x.empty()) return {};
    std::vector<std::size_t> idx(k_, 0);
    while (true) {
      std::vector<Label> v;
      for (auto i : idx) v.push_back(x[i]);
      out.push_back(Label::tuple(std::move(v)));
      std::size_t j = k_;
      while (j > 0 && ++idx[j - 1] == x.size()) idx[--j] = 0;
      if (j == 0) break;
    }
    return FinSet(std::move(out));
  }

 private:
  std::size_t k_;
};

/// X ↦ (X × St)^St for St = {0, ..., k-1}. An element is a k-tuple of
/// pairs (x, s').
class StateMonad final : public MonadSpec {
 public:
  explicit StateMonad(std::size_t k) : k_(k) { require(k >= 1, "state needs a nonempty state set"); }
  std::string name() const override { return "state:" + std::to_string(k_); }
  Count card(std::size_t n) const override { return Count::pow(Count::of(n) * Count::of(k_), Count::of(k_)); }
  Label map(const FinMap& f, const Label& s) const override {
    std::vector<Label> v;
    for (const auto& p : s.children()) v.push_back(Label::tuple({f(p[0]), p[1]}));
    return Label::tuple(std::move(v));
  }
  Label unit(const Label& x) const override {
    std::vector<Label> v;
    for (std::size_t i = 0; i < k_; ++i) v.push_back(Label::tuple({x, Label::num(static_cast<std::int64_t>(i))}));
    return Label::tuple(std::move(v));
  }
  Label mult(const Label& w) const override {
    std::vector<Label> v;
    for (std::size_t i = 0; i < k_; ++i) {
      const Label& inner = w[i][0];
      auto next = static_cast<std::size_t>(w[i][1].number());
      v.push_back(inner[next]);
    }
    return Label::tuple(std::move(v));
  }
  std::optional<Label> unit_preimage(const Label& s) const override {
    const Label& x = s[0][0];
    for (std::size_t i = 0; i < k_; ++i)
      if (s[i][0] != x || s[i][1].number() != static_cast<std::int64_t>(i)) return std::nullopt;
    return x;
  }
  std::vector<Label> occurring(const Label& s) const override {
    std::vector<Label> v;
    for (const auto& p : s.children()) v.push_back(p[0]);
    return detail::sorted_unique(std::move(v));
  }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    if (x.empty()) return {};
    std::vector<Label> pairs;
    for (const auto& a : x)
      for (std::size_t s = 0; s < k_; ++s) pairs.push_back(Label::tuple({a, Label::num(static_cast<std::int64_t>(s))}));
    std::vector<Label> out;
    std::vector<std::size_t> idx(k_, 0);
    while (true) {
      std::vector<Label> v;
      for (auto i : idx) v.push_back(pairs[i]);
      out.push_back(Label::tuple(std::move(v)));
      std::size_t j = k_;
      while (j > 0 && ++idx[j - 1] == pairs.size()) idx[--j] = 0;
      if (j == 0) break;
    }
    return FinSet(std::move(out));
  }

 private:
  std::size_t k_;
};

/// The constant functor at M, or its variant sending ∅ to ∅. Functor only.
class ConstFunctor final : public MonadSpec {
 public:
  ConstFunctor(FinSet values, bool zero) : values_(std::move(values)), zero_(zero) {}
  std::string name() const override {
    return std::string(zero_ ? "const0:" : "const:") + std::to_string(values_.size());
  }
  bool has_structure() const override { return false; }
  Count card(std::size_t n) const override { return Count::of(zero_ && n == 0 ? 0 : values_.size()); }
  Label map(const FinMap&, const Label& s) const override { return s; }
  std::optional<Label> unit_preimage(const Label&) const override { return std::nullopt; }
  std::vector<Label> occurring(const Label&) const override { return {}; }
  const FinSet& values() const { return values_; }

 protected:
  FinSet make_carrier(const FinSet& x) const override {
    if (zero_ && x.empty()) return {};
    return values_;
  }

 private:
  FinSet values_;
  bool zero_;
};

/// Agrees with the wrapped monad on nonempty sets and sends ∅ to ∅.
class ZeroSubmonad final : public MonadSpec {
 public:
  explicit ZeroSubmonad(MonadPtr base) : base_(std::move(base)) {}
  std::string name() const override { return base_->name() + "^0"; }
  bool finite_valued() const override { return base_->finite_valued(); }
  bool has_structure() const override { return base_->has_structure(); }
  Count card(std::size_t n) const override { return n == 0 ? Count::of(0) : base_->card(n); }
  Label map(const FinMap& f, const Label& s) const override { return base_->map(f, s); }
  Label unit(const Label& x) const override { return base_->unit(x); }
  Label mult(const Label& w) const override { return base_->mult(w); }
  std::optional<Label> unit_preimage(const Label& s) const override { return base_->unit_preimage(s); }
  std::vector<Label> occurring(const Label& s) const override { return base_->occurring(s); }
  std::optional<std::vector<Label>> support_override(const Label& s) const override {
    return base_->support_override(s);
  }
  const MonadPtr& base() const { return base_; }

 protected:
  FinSet make_carrier(const FinSet& x) const override { return x.empty() ? FinSet{} : base_->carrier(x); }

 private:
  MonadPtr base_;
};

/// Constructs a builtin by name. Parameters are sizes (exception, reader,
/// state, const) or the admissible cardinal list (pA).
inline MonadPtr builtin(const std::string& name, const std::vector<std::size_t>& params = {}) {
  auto one = [&](std::size_t dflt) {
    if (params.empty()) return dflt;
    require(params.size() == 1, name + " takes one parameter");
    return params[0];
  };
  if (name == "exception" || name == "exception0") {
    std::size_t k = one(1);
    return std::make_shared<ExceptionMonad>(name + ":" + std::to_string(k), FinSet::symbols("e", k),
                                            name == "exception0");
  }
  if (name == "maybe") {
    require(params.empty(), "maybe takes no parameters");
    return std::make_shared<ExceptionMonad>("maybe", FinSet{Label::sym("err")}, false);
  }
  if (name == "terminal" || name == "terminal0") {
    require(params.empty(), name + " takes no parameters");
    return std::make_shared<TerminalMonad>(name == "terminal0");
  }
  if (name == "powerset") {
    require(params.empty(), "powerset takes no parameters");
    return std::make_shared<PowersetMonad>();
  }
  if (name == "reader") return std::make_shared<ReaderMonad>(one(2));
  if (name == "state") return std::make_shared<StateMonad>(one(2));
  if (name == "pA") {
    require(!params.empty(), "pA needs a cardinal list");
    return std::make_shared<PowersetMonad>(params);
  }
  if (name == "const" || name == "const0") return std::make_shared<ConstFunctor>(FinSet::symbols("m", one(1)), name == "const0");
  fail(Errc::UnknownMonad, "unknown monad '" + name + "'");
}

/// "name" or "name:p1,p2,...".
inline MonadPtr parse_monad(const std::string& text) {
  auto colon = text.find(':');
  std::string name = text.substr(0, colon);
  std::vector<std::size_t> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        fail(Errc::ContractViolation, "bad parameter '" + item + "' in '" + text + "'");
      }
    }
  }
  return builtin(name, params);
}

// ------------------------------------------------------------- law checks

struct LawResult {
  std::string law;
  std::string probe;
  bool passed = true;
  std::size_t checked = 0;
  bool exhaustive = false;
  std::string witness;
};

struct LawReport {
  std::string monad;
  std::vector<LawResult> results;
  bool ok() const {
    return std::all_of(results.begin(), results.end(), [](const LawResult& r) { return r.passed; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](auto& r) { return !r.passed; }));
  }
};

struct LawOptions {
  std::vector<FinSet> probes = {FinSet::range(0), FinSet::range(1), FinSet::range(2), FinSet::range(3)};
  std::size_t samples = 100;
  /// Check every element when the space has at most this many.
  std::uint64_t exhaustive_limit = 4096;
  std::uint64_t cap = 1u << 16;
  std::uint64_t seed = 1;
};

namespace detail {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng));
}

inline FinMap random_map(const FinSet& x, const FinSet& y, Rng& rng) {
  std::vector<Label> imgs;
  for (std::size_t i = 0; i < x.size(); ++i) imgs.push_back(y[pick(rng, y.size())]);
  return FinMap::table(x, y, std::move(imgs));
}

/// Elements of S^depth(X) for checking: every element when the space is
/// small, else `samples` random ones built by pushing small elements forward
/// along random maps.
class Sampler {
 public:
  Sampler(const MonadSpec& s, const LawOptions& opt, Rng& rng) : s_(s), opt_(opt), rng_(rng) {}

  /// S^depth(X) materialized, if within limits.
  std::optional<FinSet> level(const FinSet& x, std::size_t depth, std::uint64_t limit) {
    FinSet cur = x;
    for (std::size_t d = 0; d < depth; ++d) {
      if (!s_.card(cur.size()).fits(limit)) return std::nullopt;
      cur = s_.carrier(cur, opt_.cap);
    }
    return cur;
  }

  std::vector<Label> elements(const FinSet& x, std::size_t depth, bool& exhaustive) {
    if (auto all = level(x, depth, opt_.exhaustive_limit); all && all->size() <= opt_.exhaustive_limit) {
      exhaustive = true;
      return all->elements();
    }
    exhaustive = false;
    std::vector<Label> out;
    for (std::size_t i = 0; i < opt_.samples * 4 && out.size() < opt_.samples; ++i)
      if (auto e = one(x, depth)) out.push_back(*e);
    return out;
  }

  std::optional<Label> one(const FinSet& x, std::size_t depth) {
    if (depth == 0) {
      if (x.empty()) return std::nullopt;
      return x[pick(rng_, x.size())];
    }
    if (depth == 1 && s_.card(x.size()).fits(opt_.cap)) {
      FinSet c = s_.carrier(x, opt_.cap);
      if (c.empty()) return std::nullopt;
      return c[pick(rng_, c.size())];
    }
    // Push an element of S(K), |K| ≤ 3, forward along a random K -> S^{depth-1} X.
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::size_t k = pick(rng_, 4);
      FinSet kset = FinSet::range(k);
      FinSet sk = s_.carrier(kset, opt_.cap);
      if (sk.empty()) continue;
      std::vector<Label> imgs;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        auto e = one(x, depth - 1);
        if (!e) ok = false;
        else imgs.push_back(*e);
      }
      if (!ok) continue;
      return s_.map(FinMap::table(kset, std::nullopt, std::move(imgs)), sk[pick(rng_, sk.size())]);
    }
    return std::nullopt;
  }

 private:
  const MonadSpec& s_;
  const LawOptions& opt_;
  Rng& rng_;
};

}  // namespace detail

/// Functoriality, naturality of unit and multiplication, the unit laws and
/// associativity, each on every probe; plus the Kleisli-form laws.
inline LawReport check_laws(const MonadSpec& s, const LawOptions& opt = {}) {
  LawReport rep{s.name(), {}};
  detail::Rng rng(opt.seed);
  detail::Sampler sampler(s, opt, rng);

  // Laws that draw random maps cycle through small spaces until `samples`
  // checks have run.
  auto run_impl = [&](const std::string& law, const FinSet& probe, std::size_t depth, bool randomized, auto&& check) {
    LawResult r{law, std::to_string(probe.size()), true, 0, false, {}};
    auto elems = sampler.elements(probe, depth, r.exhaustive);
    std::size_t rounds = elems.size();
    if (randomized && !elems.empty()) rounds = std::max(rounds, opt.samples);
    for (std::size_t i = 0; i < rounds; ++i) {
      const Label& e = elems[i % elems.size()];
      ++r.checked;
      if (auto bad = check(e)) {
        r.passed = false;
        r.witness = *bad;
        break;
      }
    }
    rep.results.push_back(std::move(r));
  };
  auto run = [&](const std::string& law, const FinSet& probe, std::size_t depth, auto&& check) {
    run_impl(law, probe, depth, false, check);
  };
  auto run_random = [&](const std::string& law, const FinSet& probe, std::size_t depth, auto&& check) {
    run_impl(law, probe, depth, true, check);
  };
  auto sfn = [&s](const FinMap& f) {
    return FinMap::Fn([&s, f](const Label& x) { return s.map(f, x); });
  };

  for (const auto& x : opt.probes) {
    run("functor-identity", x, 1, [&](const Label& e) -> std::optional<std::string> {
      if (s.map(FinMap::identity(x), e) != e) return e.str();
      return std::nullopt;
    });
    for (const auto& y : opt.probes) {
      if (!x.empty() && y.empty()) continue;
      run_random("functor-composition->" + std::to_string(y.size()), x, 1, [&](const Label& e) -> std::optional<std::string> {
        for (const auto& z : opt.probes) {
          if (!y.empty() && z.empty()) continue;
          FinMap f = detail::random_map(x, y, rng), g = detail::random_map(y, z, rng);
          if (s.map(compose(g, f), e) != s.map(g, s.map(f, e))) return e.str();
        }
        return std::nullopt;
      });
    }
    if (!s.has_structure()) continue;
    for (const auto& y : opt.probes) {
      if (!x.empty() && y.empty()) continue;
      run_random("unit-naturality->" + std::to_string(y.size()), x, 0, [&](const Label& a) -> std::optional<std::string> {
        FinMap f = detail::random_map(x, y, rng);
        if (s.map(f, s.unit(a)) != s.unit(f(a))) return a.str();
        return std::nullopt;
      });
      run_random("mult-naturality->" + std::to_string(y.size()), x, 2, [&](const Label& w) -> std::optional<std::string> {
        FinMap f = detail::random_map(x, y, rng);
        if (s.map(f, s.mult(w)) != s.mult(apply_fn(s, sfn(f), w))) return w.str();
        return std::nullopt;
      });
    }
    run("left-unit", x, 1, [&](const Label& e) -> std::optional<std::string> {
      if (s.mult(s.unit(e)) != e) return e.str();
      return std::nullopt;
    });
    run("right-unit", x, 1, [&](const Label& e) -> std::optional<std::string> {
      if (s.mult(apply_fn(s, [&s](const Label& a) { return s.unit(a); }, e)) != e) return e.str();
      return std::nullopt;
    });
    run("associativity", x, 3, [&](const Label& w) -> std::optional<std::string> {
      auto m = [&s](const Label& v) { return s.mult(v); };
      if (s.mult(s.mult(w)) != s.mult(apply_fn(s, m, w))) return w.str();
      return std::nullopt;
    });
    // Kleisli form: t >>= η = t and (t >>= f) >>= g = t >>= (f >=> g).
    for (const auto& y : opt.probes) {
      if (!x.empty() && y.empty()) continue;
      run_random("kleisli-associativity->" + std::to_string(y.size()), x, 1, [&](const Label& t) -> std::optional<std::string> {
        auto f = [&](const Label&) { return sampler.one(y, 1); };
        std::vector<Label> fi;
        for (std::size_t i = 0; i < x.size(); ++i) {
          auto v = f(x[i]);
          if (!v) return std::nullopt;
          fi.push_back(*v);
        }
        std::vector<Label> gi;
        for (std::size_t i = 0; i < y.size(); ++i) {
          auto v = sampler.one(y, 1);
          if (!v) return std::nullopt;
          gi.push_back(*v);
        }
        FinMap fm = FinMap::table(x, std::nullopt, fi), gm = FinMap::table(y, std::nullopt, gi);
        FinMap fg(x, std::nullopt, [&](const Label& a) { return s.bind(gm, fm(a)); });
        if (s.bind(gm, s.bind(fm, t)) != s.bind(fg, t)) return t.str();
        if (s.bind(FinMap(x, std::nullopt, [&s](const Label& a) { return s.unit(a); }), t) != t) return t.str();
        return std::nullopt;
      });
    }
  }
  return rep;
}

/// μ ∘ S(x) for x : X -> SY, tabulated on SX.
inline FinMap kleisli_ext(const MonadSpec& s, const FinMap& x, std::uint64_t cap = kDefaultCap) {
  FinSet dom = s.carrier(x.dom(), cap);
  std::vector<Label> imgs;
  for (const auto& t : dom) imgs.push_back(s.bind(x, t));
  return FinMap::table(dom, std::nullopt, std::move(imgs));
}

struct InjectionCheck {
  bool ok = true;
  std::string witness;
};

/// S(m) is injective for every injection m between probes.
inline InjectionCheck preserves_injections(const MonadSpec& s, const std::vector<FinSet>& probes,
                                           std::uint64_t cap = kDefaultCap) {
  require(!probes.empty(), "preserves_injections: no probes");
  InjectionCheck out;
  for (const auto& x : probes)
    for (const auto& y : probes) {
      if (x.size() > y.size()) continue;
      for_each_injection(x, y, [&](const FinMap& m) {
        FinMap sm = s.action(m, cap);
        if (!is_injective(sm)) {
          out.ok = false;
          out.witness = "S of injection " + x.str() + " -> " + y.str() + " given by " + sm.dom().str() + " collapses";
          for (std::size_t i = 0; i < sm.dom().size(); ++i)
            for (std::size_t j = i + 1; j < sm.dom().size(); ++j)
              if (sm(sm.dom()[i]) == sm(sm.dom()[j])) {
                out.witness = sm.dom()[i].str() + " and " + sm.dom()[j].str() + " both go to " +
                              sm(sm.dom()[i]).str();
                return false;
              }
          return false;
        }
        return true;
      });
      if (!out.ok) return out;
    }
  return out;
}

enum class Consistency { Consistent, IsoTerminal, IsoTerminalZero };

inline std::string_view to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "Consistent";
    case Consistency::IsoTerminal: return "IsoTerminal";
    case Consistency::IsoTerminalZero: return "IsoTerminalZero";
  }
  return "?";
}

inline std::vector<FinSet> default_probes(std::size_t max = 3) {
  std::vector<FinSet> out;
  for (std::size_t n = 0; n <= max; ++n) out.push_back(FinSet::range(n));
  return out;
}

inline Consistency classify_consistency(const MonadSpec& s, const std::vector<FinSet>& probes = default_probes()) {
  for (const auto& x : probes) {
    std::vector<Label> units;
    for (const auto& a : x) units.push_back(s.unit(a));
    if (detail::sorted_unique(units).size() != units.size())
      return s.card(0) == Count::of(1) ? Consistency::IsoTerminal : Consistency::IsoTerminalZero;
  }
  return Consistency::Consistent;
}

/// First element where alg fails an Eilenberg-Moore axiom, if any.
inline std::optional<std::string> em_violation(const MonadSpec& s, const FinSet& r, const FinMap& alg,
                                               std::uint64_t cap = kDefaultCap) {
  for (const auto& x : r)
    if (alg(s.unit(x)) != x) return "unit law fails at " + x.str();
  FinSet sr = s.carrier(r, cap);
  for (const auto& t : sr)
    if (!r.contains(alg(t))) return "structure leaves the carrier at " + t.str();
  FinSet ssr = s.carrier(sr, cap);
  for (const auto& w : ssr)
    if (alg(s.mult(w)) != alg(s.map(alg, w))) return "multiplication law fails at " + w.str();
  return std::nullopt;
}

/// The bijection between S-algebra structures on R and natural maps
/// S -> R^(R^-). An element of R^(R^X) is the tuple of its values at the maps
/// k : X -> R listed in for_each_map order.
class Gamma {
 public:
  Gamma(MonadPtr s, FinSet r, FinMap alg) : s_(std::move(s)), r_(std::move(r)), alg_(std::move(alg)) {
    if (auto bad = em_violation(*s_, r_, alg_)) fail(Errc::InvalidAlgebra, *bad);
  }

  /// k ↦ alg(S(k)(s)).
  Label component(const FinSet& x, const Label& s) const {
    std::vector<Label> vals;
    for_each_map(x, r_, [&](const FinMap& k) {
      vals.push_back(alg_(s_->map(k, s)));
      return true;
    });
    return Label::tuple(std::move(vals));
  }

  FinMap component_map(const FinSet& x) const {
    FinSet sx = s_->carrier(x);
    std::vector<Label> imgs;
    for (const auto& s : sx) imgs.push_back(component(x, s));
    return FinMap::table(sx, std::nullopt, std::move(imgs));
  }

  /// R^(R^f) on continuation elements over X.
  Label continuation_map(const FinMap& f, const Label& phi) const {
    std::vector<Label> dom_maps;
    std::size_t idx = 0;
    std::map<std::vector<Label>, std::size_t> index;
    for_each_map(f.dom(), r_, [&](const FinMap& k) {
      index.emplace(k.images(), idx++);
      return true;
    });
    std::vector<Label> vals;
    for_each_map(f.cod(), r_, [&](const FinMap& k) {
      vals.push_back(phi[index.at(compose(k, f).images())]);
      return true;
    });
    return Label::tuple(std::move(vals));
  }

  /// Recovers the algebra: the component at R evaluated at id_R.
  FinMap inverse() const {
    std::size_t id_index = 0, i = 0;
    for_each_map(r_, r_, [&](const FinMap& k) {
      if (k.images() == r_.elements()) {
        id_index = i;
        return false;
      }
      ++i;
      return true;
    });
    FinSet sr = s_->carrier(r_);
    std::vector<Label> imgs;
    for (const auto& s : sr) imgs.push_back(component(r_, s)[id_index]);
    return FinMap::table(sr, r_, std::move(imgs));
  }

  const FinSet& r() const { return r_; }
  const MonadSpec& monad() const { return *s_; }

 private:
  MonadPtr s_;
  FinSet r_;
  FinMap alg_;
};

}  // namespace copro
