#pragma once

// Canonical element labels.
//
// Every element of every carrier is a Label: a number, a symbol, a tagged
// injection of a label, an ordered tuple of labels or a finite set of labels.
// Labels are perfectly shared (hash-consed), so equality is pointer equality
// and hashing is O(1). The total order is structural and independent of
// allocation order, which keeps every enumeration deterministic.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace copro {

class Label {
 public:
  enum class Kind : std::uint8_t { Num, Sym, Inj, Tuple, Set };

  /// The number 0.
  Label() : node_(zero()) {}

  static Label num(std::int64_t n) { return Label(intern(Kind::Num, n, {}, {})); }
  static Label sym(std::string_view s) { return Label(intern(Kind::Sym, 0, s, {})); }
  static Label inj(std::int64_t tag, Label x) { return Label(intern(Kind::Inj, tag, {}, {x})); }
  static Label tuple(std::vector<Label> xs) { return Label(intern(Kind::Tuple, 0, {}, std::move(xs))); }
  /// Sorts and deduplicates.
  static Label set(std::vector<Label> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return Label(intern(Kind::Set, 0, {}, std::move(xs)));
  }
  /// Caller guarantees xs is strictly increasing.
  static Label set_from_sorted(std::vector<Label> xs) {
    return Label(intern(Kind::Set, 0, {}, std::move(xs)));
  }

  Kind kind() const noexcept { return node_->kind; }
  bool is(Kind k) const noexcept { return node_->kind == k; }
  /// Value of a Num, tag of an Inj.
  std::int64_t number() const noexcept { return node_->value; }
  std::int64_t tag() const noexcept { return node_->value; }
  const std::string& name() const noexcept { return node_->text; }
  std::span<const Label> children() const noexcept { return node_->kids; }
  std::size_t size() const noexcept { return node_->kids.size(); }
  const Label& operator[](std::size_t i) const noexcept { return node_->kids[i]; }
  /// Payload of an Inj.
  const Label& inner() const noexcept { return node_->kids.front(); }

  std::size_t hash() const noexcept { return node_->hash; }

  friend bool operator==(const Label& a, const Label& b) noexcept { return a.node_ == b.node_; }
  friend std::strong_ordering operator<=>(const Label& a, const Label& b) noexcept {
    return compare(a.node_, b.node_);
  }

  std::string str() const {
    std::string out;
    print(out);
    return out;
  }

 private:
  struct Node {
    Kind kind;
    std::int64_t value;
    std::string text;
    std::vector<Label> kids;
    std::size_t hash;
  };

  explicit Label(const Node* n) : node_(n) {}

  static std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }

  struct NodeHash {
    std::size_t operator()(const Node* n) const noexcept { return n->hash; }
  };
  struct NodeEq {
    bool operator()(const Node* a, const Node* b) const noexcept {
      return a->kind == b->kind && a->value == b->value && a->text == b->text && a->kids == b->kids;
    }
  };

  struct Pool {
    std::mutex mutex;
    std::deque<Node> storage;
    std::unordered_set<const Node*, NodeHash, NodeEq> index;
  };

  static const Node* zero() {
    static const Node* z = intern(Kind::Num, 0, {}, {});
    return z;
  }

  static Pool& pool() {
    static Pool* p = new Pool();  // lives for the whole process; labels are never freed
    return *p;
  }

  static const Node* intern(Kind kind, std::int64_t value, std::string_view text, std::vector<Label> kids) {
    std::size_t h = mix(static_cast<std::size_t>(kind), std::hash<std::int64_t>{}(value));
    h = mix(h, std::hash<std::string_view>{}(text));
    for (const auto& k : kids) h = mix(h, k.node_->hash);
    Node probe{kind, value, std::string(text), std::move(kids), h};
    Pool& p = pool();
    std::lock_guard lock(p.mutex);
    if (auto it = p.index.find(&probe); it != p.index.end()) return *it;
    p.storage.push_back(std::move(probe));
    const Node* stored = &p.storage.back();
    p.index.insert(stored);
    return stored;
  }

  static std::strong_ordering compare(const Node* a, const Node* b) noexcept {
    if (a == b) return std::strong_ordering::equal;
    if (a->kind != b->kind) return a->kind <=> b->kind;
    switch (a->kind) {
      case Kind::Num: return a->value <=> b->value;
      case Kind::Sym: {
        int c = a->text.compare(b->text);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
      }
      case Kind::Inj:
        if (a->value != b->value) return a->value <=> b->value;
        return compare(a->kids[0].node_, b->kids[0].node_);
      case Kind::Tuple:
      case Kind::Set: {
        std::size_t n = std::min(a->kids.size(), b->kids.size());
        for (std::size_t i = 0; i < n; ++i) {
          auto c = compare(a->kids[i].node_, b->kids[i].node_);
          if (c != 0) return c;
        }
        return a->kids.size() <=> b->kids.size();
      }
    }
    return std::strong_ordering::equal;
  }

  void print(std::string& out) const {
    switch (kind()) {
      case Kind::Num: out += std::to_string(number()); break;
      case Kind::Sym: out += name(); break;
      case Kind::Inj:
        out += "in" + std::to_string(tag()) + "(";
        inner().print(out);
        out += ")";
        break;
      case Kind::Tuple:
      case Kind::Set: {
        out += is(Kind::Set) ? "{" : "(";
        bool first = true;
        for (const auto& k : children()) {
          if (!first) out += ",";
          first = false;
          k.print(out);
        }
        out += is(Kind::Set) ? "}" : ")";
        break;
      }
    }
  }

  const Node* node_;
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept { return l.hash(); }
};

}  // namespace copro

template <>
struct std::hash<copro::Label> {
  std::size_t operator()(const copro::Label& l) const noexcept { return l.hash(); }
};
