#pragma once

// Existence of coproducts decided from declared fixpoint profiles. Profiles
// are declarations: fixpoints quantify over all cardinals and are never
// computed here.

#include <copro/error.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace copro {

enum class Verdict { Exists, NotExists, Unknown };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Exists: return "Exists";
    case Verdict::NotExists: return "NotExists";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

enum class FixpointKind { Inconsistent, SubstantiallyExceptional, NoFixpoints, EventuallyAllCardinals, CardinalClass };

/// Shapes of a declared fixpoint class. Every shape is unbounded.
///   PowersBeyond: all 2^κ from some κ on (accessible, not constant).
///   IntervalA / IntervalCoA: the two classes of the complementary
///     restricted-powerset pair. Each contains 2^λ for arbitrarily large λ,
///     and they are disjoint from some cardinal on.
///   Unbounded: unbounded, nothing else known.
enum class ClassShape { PowersBeyond, IntervalA, IntervalCoA, Unbounded };

inline std::string_view to_string(FixpointKind k) {
  switch (k) {
    case FixpointKind::Inconsistent: return "inconsistent";
    case FixpointKind::SubstantiallyExceptional: return "exceptional";
    case FixpointKind::NoFixpoints: return "no-fixpoints";
    case FixpointKind::EventuallyAllCardinals: return "finitary";
    case FixpointKind::CardinalClass: return "class";
  }
  return "?";
}

inline std::string_view to_string(ClassShape s) {
  switch (s) {
    case ClassShape::PowersBeyond: return "powers";
    case ClassShape::IntervalA: return "interval-a";
    case ClassShape::IntervalCoA: return "interval-coa";
    case ClassShape::Unbounded: return "unbounded";
  }
  return "?";
}

inline constexpr std::array kAllKinds = {FixpointKind::Inconsistent, FixpointKind::SubstantiallyExceptional,
                                         FixpointKind::NoFixpoints, FixpointKind::EventuallyAllCardinals,
                                         FixpointKind::CardinalClass};
inline constexpr std::array kAllShapes = {ClassShape::PowersBeyond, ClassShape::IntervalA, ClassShape::IntervalCoA,
                                          ClassShape::Unbounded};

struct FixpointProfile {
  FixpointKind kind = FixpointKind::NoFixpoints;
  /// Meaningful only for CardinalClass.
  ClassShape shape = ClassShape::Unbounded;
  /// Constant on nonempty sets, up to iso (functor profiles).
  bool substantially_constant = false;

  static FixpointProfile inconsistent() { return {FixpointKind::Inconsistent}; }
  static FixpointProfile exceptional() { return {FixpointKind::SubstantiallyExceptional}; }
  static FixpointProfile no_fixpoints() { return {FixpointKind::NoFixpoints}; }
  static FixpointProfile finitary() { return {FixpointKind::EventuallyAllCardinals}; }
  static FixpointProfile cardinal_class(ClassShape s) { return {FixpointKind::CardinalClass, s}; }
  static FixpointProfile constant() { return {FixpointKind::NoFixpoints, ClassShape::Unbounded, true}; }

  std::string str() const {
    if (substantially_constant) return "constant";
    if (kind == FixpointKind::CardinalClass) return "class:" + std::string(to_string(shape));
    return std::string(to_string(kind));
  }
  bool operator==(const FixpointProfile&) const = default;
};

/// `no-fixpoints | exceptional | finitary | inconsistent | constant | class:<shape>`.
inline FixpointProfile parse_profile(std::string_view text) {
  for (auto k : kAllKinds)
    if (k != FixpointKind::CardinalClass && text == to_string(k)) return {k};
  if (text == "constant") return FixpointProfile::constant();
  if (text.starts_with("class:")) {
    auto rest = text.substr(6);
    for (auto s : kAllShapes)
      if (rest == to_string(s)) return FixpointProfile::cardinal_class(s);
  }
  fail(Errc::ContractViolation, "bad profile '" + std::string(text) + "'");
}

/// Declared profile of a builtin, by specifier name ("reader:3" -> reader).
/// "continuation" names the continuation monad, which has no builtin.
inline FixpointProfile default_profile(std::string_view spec) {
  std::string name(spec.substr(0, spec.find(':')));
  if (name == "terminal" || name == "terminal0") return FixpointProfile::inconsistent();
  if (name == "exception" || name == "exception0" || name == "maybe") return FixpointProfile::exceptional();
  if (name == "powerset" || name == "continuation") return FixpointProfile::no_fixpoints();
  if (name == "reader" || name == "state" || name == "pA" || name == "pf") return FixpointProfile::finitary();
  if (name == "const" || name == "const0") return FixpointProfile::constant();
  fail(Errc::UnknownMonad, "no declared profile for '" + std::string(spec) + "'");
}

struct Decision {
  Verdict verdict = Verdict::Unknown;
  /// Which row of the table fired.
  std::string rule;
};

namespace detail {

/// The fixpoint class as a lattice element for intersection. Opaque is
/// unbounded with unknown shape; Undecided is an intersection whose
/// unboundedness is not known.
enum class Fix { None, All, Powers, A, CoA, Opaque, Undecided };

inline Fix fix_class(const FixpointProfile& p) {
  switch (p.kind) {
    case FixpointKind::NoFixpoints: return Fix::None;
    case FixpointKind::EventuallyAllCardinals: return Fix::All;
    case FixpointKind::CardinalClass:
      switch (p.shape) {
        case ClassShape::PowersBeyond: return Fix::Powers;
        case ClassShape::IntervalA: return Fix::A;
        case ClassShape::IntervalCoA: return Fix::CoA;
        case ClassShape::Unbounded: return Fix::Opaque;
      }
      break;
    default: break;
  }
  fail(Errc::ContractViolation, "no fixpoint class for " + p.str());
}

/// Large part of the intersection of two fixpoint classes.
inline Fix meet(Fix x, Fix y) {
  if (x == Fix::None || y == Fix::None) return Fix::None;
  if (x == Fix::All) return y;
  if (y == Fix::All) return x;
  if (x == Fix::Undecided || y == Fix::Undecided || x == Fix::Opaque || y == Fix::Opaque) return Fix::Undecided;
  if (x == y) return x;
  // Powers meets either interval class in its powers; the intervals are disjoint.
  if (x == Fix::Powers) return y;
  if (y == Fix::Powers) return x;
  return Fix::None;
}

inline Decision joint_decision(Fix joint) {
  if (joint == Fix::None) return {Verdict::NotExists, "joint-fixpoints-bounded"};
  if (joint == Fix::Undecided) return {Verdict::Unknown, "joint-fixpoints-undecided: the threshold cardinal is not computable"};
  return {Verdict::Exists, "joint-fixpoints-unbounded"};
}

inline bool absorbing(const FixpointProfile& p) {
  return p.kind == FixpointKind::Inconsistent || p.kind == FixpointKind::SubstantiallyExceptional;
}

}  // namespace detail

inline Decision coproduct_exists(const FixpointProfile& p, const FixpointProfile& q) {
  if (p.kind == FixpointKind::Inconsistent || q.kind == FixpointKind::Inconsistent)
    return {Verdict::Exists, "inconsistent-summand"};
  if (p.kind == FixpointKind::SubstantiallyExceptional || q.kind == FixpointKind::SubstantiallyExceptional)
    return {Verdict::Exists, "exceptional-summand"};
  return detail::joint_decision(detail::meet(detail::fix_class(p), detail::fix_class(q)));
}

inline Decision family_exists(const std::vector<FixpointProfile>& profiles) {
  if (profiles.size() < 2) fail(Errc::ContractViolation, "a family needs at least two profiles");
  for (const auto& p : profiles)
    if (p.kind == FixpointKind::Inconsistent) return {Verdict::Exists, "inconsistent-summand"};
  std::vector<detail::Fix> rest;
  for (const auto& p : profiles)
    if (!detail::absorbing(p)) rest.push_back(detail::fix_class(p));
  if (rest.size() <= 1) return {Verdict::Exists, "all-but-one-exceptional"};
  detail::Fix joint = detail::Fix::All;
  for (auto f : rest) joint = detail::meet(joint, f);
  return detail::joint_decision(joint);
}

/// Monad S has coproducts with all finitary monads iff S generates a free
/// monad, i.e. iff S ⊕ (any finitary, non-exceptional monad) exists.
inline Decision all_finitary_coproducts(const FixpointProfile& s) {
  Decision d = coproduct_exists(s, FixpointProfile::finitary());
  d.rule = "with-all-finitary: " + d.rule;
  return d;
}

/// The profile of the free monad on a functor with profile h, or nullopt
/// when none exists (neither unbounded fixpoints nor constant). A constant
/// functor X ↦ M generates X + M; otherwise large fixpoints carry over.
inline std::optional<FixpointProfile> free_monad_profile(const FixpointProfile& h) {
  if (h.substantially_constant || h.kind == FixpointKind::Inconsistent) return FixpointProfile::exceptional();
  switch (h.kind) {
    case FixpointKind::NoFixpoints: return std::nullopt;
    // X + E as a functor: its free monad is finitary and not exceptional.
    case FixpointKind::SubstantiallyExceptional: return FixpointProfile::finitary();
    default: return h;
  }
}

struct FreeDecision {
  bool free_monad_exists = false;
  std::optional<FixpointProfile> free_profile;
  Decision decision;
};

/// S ⊕ F_H for a monad profile s and functor profile h.
inline FreeDecision free_monad_rules(const FixpointProfile& h, const FixpointProfile& s) {
  FreeDecision out;
  out.free_profile = free_monad_profile(h);
  out.free_monad_exists = out.free_profile.has_value();
  if (!out.free_monad_exists) {
    out.decision = {Verdict::NotExists, "no-free-monad: the functor has no arbitrarily large fixpoints"};
    return out;
  }
  out.decision = coproduct_exists(s, *out.free_profile);
  if (s.kind == FixpointKind::EventuallyAllCardinals && out.decision.verdict == Verdict::Exists)
    out.decision.rule = "finitary-with-free";
  return out;
}

/// F_H ⊕ F_K, which is the free monad on H + K when it exists.
inline FreeDecision free_pair_rules(const FixpointProfile& h, const FixpointProfile& k) {
  FreeDecision out;
  auto fh = free_monad_profile(h), fk = free_monad_profile(k);
  if (!fh || !fk) {
    out.decision = {Verdict::NotExists, "no-free-monad: a summand generates none"};
    return out;
  }
  out.free_monad_exists = true;
  out.decision = coproduct_exists(*fh, *fk);
  return out;
}

}  // namespace copro
