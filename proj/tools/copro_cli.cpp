// Command-line front end. Every subcommand builds one report document and
// prints it as text or JSON; the exit code summarizes the checks.

#include <copro/copro.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <sstream>

using namespace copro;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kUndecided = 3 };

struct RunConfig {
  std::string command;
  std::string left, right, monad;
  std::vector<std::string> family;
  std::string functor;
  std::size_t base = 1;
  std::string labels;
  std::size_t budget = 8;
  std::size_t depth = 3;
  std::size_t probes = 2;
  std::size_t samples = 100;
  std::string format = "text";
  std::uint64_t seed = 7;
  std::vector<std::string> profiles;
  std::string signature, right_signature;
};

class Report {
 public:
  explicit Report(const RunConfig& cfg) {
    doc_["command"] = cfg.command;
    doc_["checks"] = json::array();
  }

  void check(const std::string& id, bool ok, const std::string& detail = "") {
    json c;
    c["id"] = id;
    c["ok"] = ok;
    if (!detail.empty()) c["detail"] = detail;
    doc_["checks"].push_back(std::move(c));
    all_ok_ = all_ok_ && ok;
  }
  json& operator[](const std::string& key) { return doc_[key]; }
  void undecided() { undecided_ = true; }

  int exit_code() const {
    if (undecided_) return kUndecided;
    return all_ok_ ? kPass : kCheckFailed;
  }

  std::string render(const std::string& format) const {
    if (format == "json") return doc_.dump(2) + "\n";
    std::ostringstream out;
    for (const auto& [key, value] : doc_.items()) {
      if (key == "checks") continue;
      out << key << ": " << text(value, 1);
      if (value.is_primitive()) out << "\n";
    }
    for (const auto& c : doc_["checks"]) {
      out << (c["ok"].get<bool>() ? "PASS " : "FAIL ") << c["id"].get<std::string>();
      if (c.contains("detail")) out << ": " << c["detail"].get<std::string>();
      out << "\n";
    }
    return out.str();
  }

 private:
  static std::string text(const json& v, int indent) {
    if (v.is_string()) {
      // Continuation lines of a multi-line value line up under its first line.
      std::string str = v.get<std::string>(), out;
      if (!str.empty() && str.back() == '\n') str.pop_back();
      std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
      for (char c : str) {
        out += c;
        if (c == '\n') out += pad;
      }
      return out;
    }
    if (v.is_primitive()) return v.dump();
    std::ostringstream out;
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    auto one_line = [](const json& x) {
      return x.is_primitive() && !(x.is_string() && x.get<std::string>().find('\n') != std::string::npos);
    };
    bool flat = v.is_array() && std::all_of(v.begin(), v.end(), one_line);
    if (flat) {
      out << "[";
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << text(v[i], 0);
      out << "]\n";
      return out.str();
    }
    out << "\n";
    if (v.is_array()) {
      for (const auto& x : v) {
        out << pad << "- " << text(x, indent + 1);
        if (x.is_primitive()) out << "\n";
      }
    } else {
      for (const auto& [k, x] : v.items()) {
        out << pad << k << ": " << text(x, indent + 1);
        if (x.is_primitive()) out << "\n";
      }
    }
    return out.str();
  }

  json doc_;
  bool all_ok_ = true;
  bool undecided_ = false;
};

FinSet base_set(const RunConfig& cfg) {
  if (cfg.labels.empty()) return FinSet::range(cfg.base);
  std::vector<Label> v;
  std::stringstream ss(cfg.labels);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(Label::sym(item));
  return FinSet(v);
}

json elements(const FinSet& x) {
  json out = json::array();
  for (const auto& e : x) out.push_back(e.str());
  return out;
}

json table(const FinMap& f) {
  json out = json::array();
  for (const auto& x : f.dom()) out.push_back(json::array({x.str(), f(x).str()}));
  return out;
}

json trace_json(const ChainResult& r) {
  json out = json::array();
  for (const auto& stage : r.trace()) {
    json row = json::array();
    for (const auto& c : stage) row.push_back(c.str());
    out.push_back(std::move(row));
  }
  return out;
}

std::string require_opt(const std::string& v, const std::string& flag) {
  if (v.empty()) throw CLI::ValidationError(flag, "required by this subcommand");
  return v;
}

std::map<std::string, FixpointProfile> profile_overrides(const RunConfig& cfg) {
  std::map<std::string, FixpointProfile> out;
  for (const auto& p : cfg.profiles) {
    auto eq = p.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--profile", "expected <monad>=<profile>");
    out[p.substr(0, eq)] = parse_profile(p.substr(eq + 1));
  }
  return out;
}

/// A profile from an override, a profile literal, "<name>-profile", or a builtin's declaration.
std::optional<FixpointProfile> lookup_profile(const std::string& what, const std::map<std::string, FixpointProfile>& overrides) {
  if (auto it = overrides.find(what); it != overrides.end()) return it->second;
  try {
    return parse_profile(what);
  } catch (const Error&) {
  }
  std::string name = what;
  if (name.ends_with("-profile")) name.resize(name.size() - 8);
  try {
    return default_profile(name);
  } catch (const Error&) {
    return std::nullopt;
  }
}

json decision_json(const Decision& d) { return json{{"verdict", std::string(to_string(d.verdict))}, {"rule", d.rule}}; }

json advisor_json(const RunConfig& cfg) {
  auto ov = profile_overrides(cfg);
  auto p = lookup_profile(cfg.left, ov), q = lookup_profile(cfg.right, ov);
  if (!p || !q) return json{{"verdict", "Unknown"}, {"rule", "no declared profile"}};
  return decision_json(coproduct_exists(*p, *q));
}

void add_laws(Report& rep, const MonadSpec& m, const RunConfig& cfg, std::size_t max_probe) {
  LawOptions opt;
  opt.probes = default_probes(max_probe);
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  LawReport laws = check_laws(m, opt);
  for (const auto& r : laws.results) {
    std::string detail = std::to_string(r.checked) + (r.exhaustive ? " (all)" : " (sampled)");
    if (!r.passed) detail += " witness " + r.witness;
    rep.check("laws." + r.law + "@" + r.probe, r.passed, detail);
  }
}

/// The exception summand and its partner, when one summand is a non-zero exception monad.
std::optional<std::pair<std::size_t, std::shared_ptr<const ExceptionMonad>>> exception_summand(const std::vector<MonadPtr>& ms) {
  for (std::size_t p = 0; p < ms.size(); ++p)
    if (auto e = std::dynamic_pointer_cast<const ExceptionMonad>(ms[p]); e && !e->zero()) return std::pair{p, e};
  return std::nullopt;
}

int cmd_coprod(const RunConfig& cfg, Report& rep) {
  MonadPtr s = parse_monad(require_opt(cfg.left, "--left")), t = parse_monad(require_opt(cfg.right, "--right"));
  FinSet a = base_set(cfg);
  rep["left"] = s->name();
  rep["right"] = t->name();
  rep["base"] = elements(a);
  rep["advisor"] = advisor_json(cfg);
  if (classify_consistency(*s) != Consistency::Consistent || classify_consistency(*t) != Consistency::Consistent) {
    MonadPtr c = inconsistent_coproduct({s, t});
    rep["special_case"] = "inconsistent summand: " + c->name();
    rep["carrier"] = elements(c->carrier(a));
    add_laws(rep, *c, cfg, cfg.probes);
    return rep.exit_code();
  }
  CoproductMonad cop({s, t}, BuildOptions{cfg.budget, kDefaultCap});
  const BuildResult& b = cop.build_at(a);
  rep["trace"] = trace_json(b.chain);
  if (!b.converged()) {
    rep["reason"] = b.chain.reason;
    rep.check("chain.converged", false, "no convergence within budget " + std::to_string(cfg.budget));
    rep.undecided();
    return rep.exit_code();
  }
  rep["converged_at"] = b.chain.solution->converged_at;
  rep["sort_sizes"] = b.sort_sizes();
  rep["carrier"] = elements(*b.carrier);
  rep.check("chain.converged", true, "stage " + std::to_string(b.chain.solution->converged_at));
  add_laws(rep, cop, cfg, std::min(cfg.probes, a.size()));
  auto emb = check_embeddings(cop, default_probes(std::min(cfg.probes, a.size())));
  rep.check("embeddings.injective", emb.injective, emb.failure);
  rep.check("embeddings.monad-morphism", emb.unit_ok && emb.mult_ok, emb.failure);
  if (auto ex = exception_summand(cop.summands())) {
    const auto& [p, e] = *ex;
    MonadPtr other = cop.summands()[1 - p];
    CompareOptions copt;
    copt.seed = cfg.seed;
    auto cmp = canonical_compare(cop, exception_bialgebra_oracle(other, e->errors(), p == 0), a, copt);
    rep["oracle"] = other->name() + "(A + E), |E| = " + std::to_string(e->errors().size());
    rep.check("oracle.size", cmp.sizes_match,
              std::to_string(cmp.carrier_size) + " vs " + std::to_string(cmp.oracle_size));
    rep.check("oracle.bijective", cmp.bijective, cmp.mismatch);
    rep.check("oracle.unit", cmp.unit_ok, cmp.mismatch);
    rep.check("oracle.algebra-squares", cmp.algebra_squares_ok, cmp.mismatch);
    rep.check("oracle.mult", cmp.mult_ok,
              std::to_string(cmp.mult_checked) + (cmp.mult_exhaustive ? " (all)" : " (sampled)"));
  }
  return rep.exit_code();
}

int cmd_laws(const RunConfig& cfg, Report& rep) {
  MonadPtr m = parse_monad(require_opt(cfg.monad, "--monad"));
  rep["monad"] = m->name();
  add_laws(rep, *m, cfg, cfg.probes);
  return rep.exit_code();
}

int cmd_complement(const RunConfig& cfg, Report& rep) {
  MonadPtr m = parse_monad(require_opt(cfg.monad, "--monad"));
  FinSet a = base_set(cfg);
  auto view = complement(m);
  FinSet c = view.carrier_at(a);
  rep["monad"] = m->name();
  rep["base"] = elements(a);
  json rows = json::array();
  for (const auto& e : c) {
    json row{{"element", e.str()}};
    try {
      json sup = json::array();
      for (const auto& x : minimal_support(*m, a, e)) sup.push_back(x.str());
      row["support"] = std::move(sup);
    } catch (const Error& err) {
      row["support"] = std::string(to_string(err.code()));
    }
    rows.push_back(std::move(row));
  }
  rep["complement"] = std::move(rows);
  rep.check("complement.size", Count::of(c.size()) == view.card(a.size()), std::to_string(c.size()));
  return rep.exit_code();
}

int cmd_chain(const RunConfig& cfg, Report& rep) {
  MonadPtr s = parse_monad(require_opt(cfg.left, "--left")), t = parse_monad(require_opt(cfg.right, "--right"));
  FinSet a = base_set(cfg);
  FreeMultialgebra fm({s, t});
  ChainResult r = run_chain(fm.system(a), ChainOptions{cfg.budget, kDefaultCap});
  rep["base"] = elements(a);
  rep["trace"] = trace_json(r);
  rep["advisor"] = advisor_json(cfg);
  if (r.converged()) {
    rep["converged_at"] = r.solution->converged_at;
    rep.check("chain.converged", true, "stage " + std::to_string(r.solution->converged_at));
  } else {
    rep["reason"] = r.reason;
    rep.check("chain.converged", false, "no convergence within budget " + std::to_string(cfg.budget));
    rep.undecided();
  }
  return rep.exit_code();
}

int cmd_closure(const RunConfig& cfg, Report& rep) {
  MonadPtr m = parse_monad(require_opt(cfg.monad, "--monad"));
  ClosureResult c = closure_at_empty(*m);
  rep["monad"] = m->name();
  rep["value_at_empty"] = elements(c.value_at_empty);
  rep["reflection_at_empty"] = table(c.reflection_at_empty);
  rep["classification"] = std::string(to_string(c.classification));
  rep.check("closure.reflection", c.classification == ClosureKind::ZeroOfClosure || c.reflection_bijective,
            c.classification == ClosureKind::ZeroOfClosure ? "value at the empty set is empty"
            : c.reflection_bijective                      ? "bijective"
                                                          : "not bijective");
  if (m->has_structure() && classify_consistency(*m) == Consistency::Consistent) {
    auto closed = monad_closure(m);
    add_laws(rep, *closed, cfg, cfg.probes);
  }
  return rep.exit_code();
}

int cmd_classify(const RunConfig& cfg, Report& rep) {
  MonadPtr m = parse_monad(require_opt(cfg.monad, "--monad"));
  rep["monad"] = m->name();
  rep["consistency"] = m->has_structure() ? std::string(to_string(classify_consistency(*m))) : "functor only";
  try {
    rep["closure"] = std::string(to_string(classify(*m)));
    rep.check("classify", true);
  } catch (const Error& e) {
    rep.check("classify", false, e.what());
  }
  auto ev = substantially_exceptional(m);
  rep["substantially_exceptional"] = ev.exceptional;
  rep["substantially_constant"] = ev.constant;
  rep["evidence"] = ev.note;
  try {
    rep["profile"] = default_profile(cfg.monad).str();
  } catch (const Error&) {
    rep["profile"] = "undeclared";
  }
  return rep.exit_code();
}

int cmd_advise(const RunConfig& cfg, Report& rep) {
  auto ov = profile_overrides(cfg);
  auto get = [&](const std::string& what) {
    auto p = lookup_profile(what, ov);
    if (!p) throw CLI::ValidationError(what, "no declared profile");
    return *p;
  };
  if (!cfg.family.empty()) {
    std::vector<FixpointProfile> ps;
    json names = json::array();
    for (const auto& f : cfg.family) {
      ps.push_back(get(f));
      names.push_back(f + " = " + ps.back().str());
    }
    rep["family"] = std::move(names);
    rep["decision"] = decision_json(family_exists(ps));
    return rep.exit_code();
  }
  FixpointProfile s = get(require_opt(cfg.left, "--left"));
  rep["left"] = cfg.left + " = " + s.str();
  if (!cfg.functor.empty()) {
    FixpointProfile h = get(cfg.functor);
    auto r = free_monad_rules(h, s);
    rep["functor"] = cfg.functor + " = " + h.str();
    rep["free_monad_exists"] = r.free_monad_exists;
    if (r.free_profile) rep["free_monad_profile"] = r.free_profile->str();
    rep["decision"] = decision_json(r.decision);
    return rep.exit_code();
  }
  FixpointProfile t = get(require_opt(cfg.right, "--right"));
  rep["right"] = cfg.right + " = " + t.str();
  rep["decision"] = decision_json(coproduct_exists(s, t));
  return rep.exit_code();
}

int cmd_terms(const RunConfig& cfg, Report& rep) {
  MonadPtr s = parse_monad(require_opt(cfg.left, "--left")), t = parse_monad(require_opt(cfg.right, "--right"));
  FinSet a = base_set(cfg);
  LayeredTerms lt({s, t});
  auto terms = lt.enumerate(a, cfg.depth);
  json out = json::array();
  std::size_t bad = 0;
  for (const auto& term : terms) {
    out.push_back(cfg.format == "json" ? lt.str(term) : lt.pretty(term));
    if (lt.canonical_violation(term)) ++bad;
  }
  rep["base"] = elements(a);
  rep["depth"] = cfg.depth;
  rep["count"] = terms.size();
  rep["terms"] = std::move(out);
  rep.check("terms.canonical", bad == 0, std::to_string(bad) + " non-canonical");
  return rep.exit_code();
}

int cmd_free(const RunConfig& cfg, Report& rep) {
  Signature sig = parse_signature(cfg.signature);
  FinSet a = base_set(cfg);
  rep["signature"] = sig.str();
  rep["base"] = elements(a);
  if (!cfg.right_signature.empty()) {
    Signature right = parse_signature(cfg.right_signature);
    auto r = verify_free_sum(sig, right, a, cfg.depth);
    rep["right_signature"] = right.str();
    rep["sum_signature"] = sum_signature(sig, right).str();
    rep["counts_by_depth"] = r.counts;
    rep.check("free.sum-bijection", r.ok, r.failure);
    return rep.exit_code();
  }
  auto barr = verify_barr(sig, a, cfg.depth);
  rep["counts_by_height"] = barr.counts;
  rep.check("free.fixpoint-bijection", barr.ok, barr.failure);
  FreeMonad f(sig);
  json by_size = json::array();
  for (std::size_t k = 0; k <= cfg.depth; ++k) by_size.push_back(f.enumerate_by_size(a, k).size());
  rep["counts_by_size"] = std::move(by_size);
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coproducts of finite-set monads"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--base", cfg.base, "Base set size");
    sub->add_option("--labels", cfg.labels, "Explicit base labels, comma-separated");
    sub->add_option("--budget", cfg.budget, "Chain stage budget");
    sub->add_option("--depth", cfg.depth, "Term depth");
    sub->add_option("--probes", cfg.probes, "Largest probe set size for law checks");
    sub->add_option("--samples", cfg.samples, "Samples per law and probe");
    sub->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--seed", cfg.seed, "Seed for sampled checks");
    sub->add_option("--profile", cfg.profiles, "Profile declaration <monad>=<profile>");
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, Report&);
  };
  const Sub subs[] = {
      {"coprod", "Build a coproduct and check it", cmd_coprod},
      {"laws", "Monad law suite", cmd_laws},
      {"complement", "Unit complement with supports", cmd_complement},
      {"chain", "Initial-chain stage trace", cmd_chain},
      {"closure", "Closure at the empty set", cmd_closure},
      {"classify", "Consistency, closure kind and evidence", cmd_classify},
      {"advise", "Coproduct existence from fixpoint profiles", cmd_advise},
      {"terms", "Layered term enumeration", cmd_terms},
      {"free", "Free monad term tools", cmd_free},
  };
  std::map<CLI::App*, const Sub*> by_app;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    sub->add_option("--left", cfg.left, "Left monad");
    sub->add_option("--right", cfg.right, "Right monad");
    sub->add_option("--monad", cfg.monad, "Monad");
    if (std::string(s.name) == "advise") {
      sub->add_option("--family", cfg.family, "Family member (repeatable)");
      sub->add_option("--functor", cfg.functor, "Functor generating a free monad");
    }
    if (std::string(s.name) == "free") {
      sub->add_option("--signature", cfg.signature, "Signature, e.g. f/2,c/0");
      sub->add_option("--right-signature", cfg.right_signature, "Second signature for a free sum");
    }
    by_app[sub] = &s;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }
  CLI::App* chosen = app.get_subcommands().front();
  const Sub* sub = by_app.at(chosen);
  cfg.command = sub->name;
  Report rep(cfg);
  int rc = kPass;
  try {
    rc = sub->run(cfg, rep);
  } catch (const CLI::Error& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::UnknownMonad:
      case Errc::ContractViolation:
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
      case Errc::NoConvergence:
      case Errc::BudgetExceeded:
        rep["error"] = e.what();
        rep.undecided();
        rc = rep.exit_code();
        break;
      default:
        rep["error"] = e.what();
        rep.check("run", false, e.what());
        rc = rep.exit_code();
    }
  }
  std::cout << rep.render(cfg.format);
  return rc;
}
