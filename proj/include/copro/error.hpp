#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace copro {

enum class Errc {
  ContractViolation,
  UnknownMonad,
  NotAMonad,
  BudgetExceeded,
  InvalidAlgebra,
  InconsistentMonad,
  NotInjective,
  NotBijective,
  AmbiguousSupport,
  SubfunctorViolation,
  NoConvergence,
  ClassificationViolation,
};

constexpr std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::ContractViolation: return "ContractViolation";
    case Errc::UnknownMonad: return "UnknownMonad";
    case Errc::NotAMonad: return "NotAMonad";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::InvalidAlgebra: return "InvalidAlgebra";
    case Errc::InconsistentMonad: return "InconsistentMonad";
    case Errc::NotInjective: return "NotInjective";
    case Errc::NotBijective: return "NotBijective";
    case Errc::AmbiguousSupport: return "AmbiguousSupport";
    case Errc::SubfunctorViolation: return "SubfunctorViolation";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ClassificationViolation: return "ClassificationViolation";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(Errc::ContractViolation, what);
}

}  // namespace copro
