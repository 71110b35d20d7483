#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spintensor/calculus.hpp"
#include "spintensor/canonicalizer.hpp"
#include "spintensor/lambda.hpp"
#include "spintensor/oracle.hpp"
#include "spintensor/parser.hpp"
#include "spintensor/printer.hpp"
#include "spintensor/script.hpp"

namespace spintensor {

/// pattern -> replacement, for an underived tensor with distinct slot names.
struct Rule {
  Factor pattern;
  Expr replacement;

  [[nodiscard]] Expr equation() const { return Expr(Term{Coefficient(1L), {pattern}}) - replacement; }
};

/// Points every factor at the table's current symbol of the same name.
inline Expr rebind(const Expr& e, const SymbolTable& table) {
  std::vector<Term> ts;
  for (auto t : e.terms()) {
    for (auto& f : t.factors) f.symbol = table.tensor(f.name());
    ts.push_back(std::move(t));
  }
  return Expr::from_terms(std::move(ts));
}

inline Rule make_rule(const Expr& pattern, const Expr& replacement) {
  if (pattern.terms().size() != 1) throw DerivationError("rule pattern must be a single tensor");
  const Term& t = pattern.terms().front();
  if (!t.coeff.is_one() || t.factors.size() != 1) throw DerivationError("rule pattern must be a single tensor with coefficient 1");
  const Factor& f = t.factors.front();
  if (!f.derivs.empty()) throw DerivationError("rule pattern must not carry derivatives");
  if (f.role() != TensorRole::field) throw DerivationError("rule pattern must be a field, not '" + f.name() + "'");
  if (!dummy_names(t).empty()) throw DerivationError("rule pattern must not be self-contracted");
  if (!replacement.is_empty() && replacement.free() != pattern.free())
    throw DerivationError("rule replacement has free indices " + describe(replacement.free()) + " but the pattern has " +
                          describe(pattern.free()));
  return Rule{f, replacement};
}

/// Solves an equation linear in `symbol` for it. The symbol must occur in
/// exactly one canonical term, underived and with no other factor.
inline Rule solve_for(const Expr& eq, const std::string& symbol, const SymbolTable& table) {
  if (!table.find_tensor(symbol)) throw DerivationError("unknown tensor '" + symbol + "'");
  const Expr c = canonicalize(rebind(eq, table), table).expr;
  std::vector<std::size_t> hits;
  for (std::size_t k = 0; k < c.terms().size(); ++k) {
    const auto& fs = c.terms()[k].factors;
    if (std::any_of(fs.begin(), fs.end(), [&](const Factor& f) { return f.name() == symbol; })) hits.push_back(k);
  }
  if (hits.empty()) throw DerivationError("symbol '" + symbol + "' is absent from the equation");
  if (hits.size() > 1)
    throw DerivationError("symbol '" + symbol + "' occurs in " + std::to_string(hits.size()) +
                          " independent terms; refusing to choose one");
  const Term& t = c.terms()[hits.front()];
  if (t.factors.size() != 1) throw DerivationError("symbol '" + symbol + "' occurs multiplied by another tensor");
  if (!t.factors.front().derivs.empty()) throw DerivationError("symbol '" + symbol + "' occurs only under a derivative");
  if (!dummy_names(t).empty()) throw DerivationError("symbol '" + symbol + "' occurs only as a trace");
  std::vector<Term> rest;
  for (std::size_t k = 0; k < c.terms().size(); ++k) {
    if (k != hits.front()) rest.push_back(c.terms()[k]);
  }
  const Expr pattern(Term{Coefficient(1L), {t.factors.front()}});
  return make_rule(pattern, scale(Expr::from_terms(std::move(rest)), -t.coeff.inverse()));
}

namespace detail {

/// Replacement for one occurrence f of a rule's tensor, derivatives distributed by Leibniz.
inline Expr substitute_factor(const Factor& f, const Rule& r, const SymbolTable& table) {
  std::set<std::string> used = index_names(Term{Coefficient(1L), {f}});
  for (const auto& t : r.replacement.terms()) {
    auto n = index_names(t);
    used.insert(n.begin(), n.end());
  }
  for (const auto& i : r.pattern.slots) used.insert(i.name);
  std::map<std::string, std::string> renaming;
  Expr metrics(Coefficient(1L));
  for (std::size_t k = 0; k < f.slots.size(); ++k) {
    const Index& p = r.pattern.slots[k];
    const Index& s = f.slots[k];
    if (p.variance == s.variance) {
      renaming[p.name] = s.name;
      continue;
    }
    const auto metric = table.role(TensorRole::metric);
    if (!metric) throw SymbolError("no tensor with the metric role is declared");
    const std::string w = fresh_index_name(used, "w");
    used.insert(w);
    renaming[p.name] = w;
    metrics = metrics * Expr(Term{Coefficient(1L), {Factor{metric, {}, {s, Index{w, flipped(p.variance)}}}}});
  }
  Expr out = metrics * relabel(r.replacement, renaming);
  return apply_derivatives(out, f.derivs);
}

}  // namespace detail

/// Simultaneous substitution of every rule into e.
inline Expr substitute(const Expr& e, const std::vector<Rule>& rules, const SymbolTable& table) {
  std::map<std::string, const Rule*> by_name;
  for (const auto& r : rules) {
    if (!by_name.emplace(r.pattern.name(), &r).second)
      throw DerivationError("two rules rewrite the same tensor '" + r.pattern.name() + "'");
  }
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    Expr acc(Coefficient(t.coeff));
    for (const auto& f : t.factors) {
      auto it = by_name.find(f.name());
      const Expr part = it == by_name.end() ? Expr(Term{Coefficient(1L), {f}}) : detail::substitute_factor(f, *it->second, table);
      acc = acc * part;
    }
    out.insert(out.end(), acc.terms().begin(), acc.terms().end());
  }
  return Expr::from_terms(std::move(out));
}

/// c with a = c * b, if the two are proportional and b is nonzero.
inline std::optional<Coefficient> proportionality(const Expr& a, const Expr& b, const SymbolTable& table) {
  const Expr ca = canonicalize(rebind(a, table), table).expr;
  const Expr cb = canonicalize(rebind(b, table), table).expr;
  if (cb.is_empty() || ca.is_empty()) return std::nullopt;
  const Term& lead = cb.terms().front();
  const std::string key = detail::term_key(lead);
  for (const auto& t : ca.terms()) {
    if (detail::term_key(t) != key) continue;
    const Coefficient ratio = t.coeff / lead.coeff;
    if (canonicalize(ca - scale(cb, ratio), table).expr.is_empty()) return ratio;
    return std::nullopt;
  }
  return std::nullopt;
}

struct EngineOptions {
  std::map<std::string, Coefficient> lambda_overrides;  ///< applied to every `lambdas` step
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  bool no_cyclic = false;
  bool bianchi = false;  ///< run the first-Bianchi pass before zero checks
};

struct StepRecord {
  std::size_t line = 0;
  std::string name;
  std::string command;
  std::string status;  ///< ok | pass | FAIL | error
  std::string detail;
  std::string residue;
  double ms = 0;
};

struct Report {
  std::vector<StepRecord> steps;
  std::vector<std::string> notes;
  std::string ricci_convention;
  std::string final_term;
  std::string failed_step;
  bool passed = true;
  bool parse_failure = false;
  int assertions = 0;

  [[nodiscard]] int exit_code() const { return passed ? 0 : (parse_failure ? 2 : 1); }

  [[nodiscard]] std::string text(bool timings = true) const {
    std::string s;
    for (const auto& r : steps) {
      std::string head = "[" + r.status + "]";
      head.resize(9, ' ');
      s += head + (r.name.empty() ? r.command : r.name + ": " + r.command);
      if (timings) s += "  (" + std::to_string(static_cast<long>(r.ms)) + " ms)";
      s += "\n";
      if (!r.detail.empty()) s += "         " + r.detail + "\n";
      if (!r.residue.empty()) s += "         residue: " + r.residue + "\n";
    }
    for (const auto& n : notes) s += "note: " + n + "\n";
    if (!ricci_convention.empty()) s += "ricci convention: " + ricci_convention + "\n";
    if (!final_term.empty()) s += "final: " + final_term + "\n";
    s += std::string(passed ? "PASS" : "FAIL") + ": " + std::to_string(steps.size()) + " steps, " +
         std::to_string(assertions) + " checks";
    if (!passed) s += ", stopped at '" + failed_step + "'";
    s += "\n";
    return s;
  }
};

/// Runs scripts step by step against a registry of named equations, rules and
/// lambda assignments. Stops at the first failed check.
class Engine {
 public:
  explicit Engine(SymbolTable table = standard_symbols(), EngineOptions opt = {})
      : table_(std::move(table)), opt_(std::move(opt)) {}

  Report run(const Script& script) {
    Report rep;
    for (const auto& step : script.steps) {
      StepRecord rec;
      rec.line = step.line;
      rec.name = step.name;
      rec.command = step.command;
      const auto start = std::chrono::steady_clock::now();
      try {
        execute(step, rec, rep);
      } catch (const ParseError& err) {
        rec.status = "error";
        rec.detail = err.what();
        rep.parse_failure = true;
      } catch (const Error& err) {
        rec.status = "error";
        rec.detail = err.what();
      }
      rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      const bool stop = rec.status == "FAIL" || rec.status == "error";
      rep.steps.push_back(std::move(rec));
      if (stop) {
        rep.passed = false;
        rep.failed_step = step.name.empty() ? step.command : step.name;
        break;
      }
    }
    if (ricci_sign_) rep.ricci_convention = convention_text(*ricci_sign_);
    return rep;
  }

  [[nodiscard]] const SymbolTable& table() const { return table_; }
  SymbolTable& table() { return table_; }

  [[nodiscard]] std::optional<Expr> equation(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    if (it->second.expr) return rebind(*it->second.expr, table_);
    if (it->second.rule) return rebind(it->second.rule->equation(), table_);
    return std::nullopt;
  }

  [[nodiscard]] const Rule* rule(const std::string& name) const {
    auto it = values_.find(name);
    return it == values_.end() || !it->second.rule ? nullptr : &*it->second.rule;
  }

  [[nodiscard]] const LambdaAssignment* assignment(const std::string& name) const {
    auto it = values_.find(name);
    return it == values_.end() || !it->second.lambdas ? nullptr : &*it->second.lambdas;
  }

  [[nodiscard]] std::optional<int> ricci_sign() const { return ricci_sign_; }

  /// Names of every equation, rule and lambda assignment registered so far.
  [[nodiscard]] std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& [k, v] : values_) out.insert(k);
    return out;
  }

  /// Applies a `tensor`, `scalar` or `dimension` directive to the table.
  void declare(const ScriptStep& step) {
    if (step.command == "dimension") {
      table_.set_dimension(std::stoi(step.args));
    } else if (step.command == "scalar") {
      for (const auto& w : step.words) table_.declare_scalar(w);
    } else {
      const auto d = parse_tensor_declaration(step.args);
      const Coefficient charge = d.charge == "0" ? Coefficient() : scalar_value(d.charge);
      table_.declare_tensor(d.name, d.rank, d.generators, d.traceless, charge, d.role, d.cyclic);
    }
  }

  static std::string convention_text(int sign) {
    return std::string("R_{bd} = ") + (sign > 0 ? "+" : "-") + "g^{ac} R_{abcd}";
  }

 private:
  struct Value {
    std::optional<Expr> expr;
    std::optional<Rule> rule;
    std::optional<LambdaAssignment> lambdas;
  };

  Expr canon(const Expr& e) const {
    Expr c = canonicalize(rebind(e, table_), table_).expr;
    if (opt_.bianchi) c = bianchi_pass(c, table_);
    return c;
  }

  Expr operand(const Operand& op) const {
    if (op.is_ref) {
      auto it = values_.find(op.text);
      if (it == values_.end()) throw ParseError("undefined reference '" + op.text + "'", Span{op.offset, op.offset + op.text.size()});
      if (it->second.expr) return rebind(*it->second.expr, table_);
      if (it->second.rule) return rebind(it->second.rule->equation(), table_);
      throw DerivationError("'" + op.text + "' is a lambda assignment, not an equation");
    }
    const ExprResolver resolver = [this](const std::string& name) -> std::optional<Expr> { return equation(name); };
    return parse_expr(op.text, table_, resolver, op.offset);
  }

  const LambdaAssignment& lambdas_named(const std::string& name) const {
    const auto* a = assignment(name);
    if (!a) throw DerivationError("'" + name + "' is not a lambda assignment");
    return *a;
  }

  Coefficient scalar_value(const std::string& text) const {
    const Expr e = parse_expr(text, table_);
    if (!e.is_scalar()) throw DerivationError("'" + text + "' is not a scalar");
    return e.scalar_value();
  }

  void store(const ScriptStep& step, Expr e, StepRecord& rec) {
    rec.detail = std::to_string(e.terms().size()) + " terms: " + print_expr(e);
    values_[step.name].expr = std::move(e);
  }

  void check(bool ok, const std::string& residue, StepRecord& rec, Report& rep) {
    ++rep.assertions;
    rec.status = ok ? "pass" : "FAIL";
    if (!ok) rec.residue = residue;
  }

  void execute(const ScriptStep& step, StepRecord& rec, Report& rep) {
    const std::string& cmd = step.command;
    rec.status = "ok";
    if (cmd == "tensor" || cmd == "scalar" || cmd == "dimension") {
      declare(step);
      rec.detail = step.args;
    } else if (cmd == "define" || cmd == "combine") {
      store(step, operand(step.operands[0]), rec);
    } else if (cmd == "rule") {
      Rule r = make_rule(operand(step.operands[0]), operand(step.operands[1]));
      rec.detail = print_factor(r.pattern) + " -> " + print_expr(r.replacement);
      values_[step.name].rule = std::move(r);
    } else if (cmd == "solve") {
      Rule r = solve_for(operand(step.operands[0]), step.symbol, table_);
      rec.detail = print_factor(r.pattern) + " -> " + print_expr(r.replacement);
      values_[step.name].rule = std::move(r);
    } else if (cmd == "substitute") {
      std::vector<Rule> rules;
      for (const auto& w : step.words) {
        const Rule* r = rule(w);
        if (!r) throw DerivationError("'" + w + "' is not a rule");
        Rule copy = *r;
        copy.pattern.symbol = table_.tensor(copy.pattern.name());
        copy.replacement = rebind(copy.replacement, table_);
        rules.push_back(std::move(copy));
      }
      store(step, substitute(operand(step.operands[0]), rules, table_), rec);
    } else if (cmd == "lambdas") {
      std::map<std::string, Coefficient> choices;
      for (const auto& [k, v] : step.options) choices[k] = scalar_value(v);
      for (const auto& [k, v] : opt_.lambda_overrides) choices[k] = v;
      LambdaAssignment a = lambda_solve(choices);
      std::string d;
      for (int k = 1; k <= 12; ++k) d += (k > 1 ? ", " : "") + std::string("lam") + std::to_string(k) + "=" + print_coefficient(a.at(k));
      rec.detail = d;
      values_[step.name].lambdas = std::move(a);
    } else if (cmd == "constrain") {
      store(step, lambdas_named(step.words[0]).apply(operand(step.operands[0])), rec);
    } else if (cmd == "specialize") {
      std::map<std::string, Coefficient> values;
      for (const auto& [k, v] : step.options) {
        if (!table_.is_scalar(k)) throw DerivationError("'" + k + "' is not a declared scalar");
        values[k] = scalar_value(v);
      }
      std::vector<Term> ts;
      const Expr e = operand(step.operands[0]);
      for (const auto& t : e.terms()) ts.push_back(Term{t.coeff.substitute(values), t.factors});
      store(step, Expr::from_terms(std::move(ts)), rec);
    } else if (cmd == "zero") {
      std::set<std::string> names;
      for (const auto& w : step.words) names.insert(table_.tensor(w)->name);
      store(step, set_to_zero(operand(step.operands[0]), names), rec);
    } else if (cmd == "normal_order") {
      store(step, normal_order(canon(operand(step.operands[0])), table_), rec);
    } else if (cmd == "ricci") {
      if (!ricci_sign_) throw DerivationError("no Ricci convention has been established yet");
      store(step, canon(rewrite_ricci(canon(operand(step.operands[0])), table_, *ricci_sign_)), rec);
    } else if (cmd == "canon") {
      store(step, canon(operand(step.operands[0])), rec);
    } else if (cmd == "bianchi") {
      store(step, bianchi_pass(operand(step.operands[0]), table_), rec);
    } else if (cmd == "relabel") {
      std::map<std::string, std::string> ren(step.options.begin(), step.options.end());
      store(step, relabel(operand(step.operands[0]), ren), rec);
    } else if (cmd == "project") {
      const std::string& m = step.words[0];
      const ProjectMode mode = m == "sym"       ? ProjectMode::symmetrize
                               : m == "antisym" ? ProjectMode::antisymmetrize
                                                : ProjectMode::traceless_symmetrize;
      std::vector<std::string> names(step.words.begin() + 1, step.words.end());
      store(step, project(operand(step.operands[0]), mode, names, table_), rec);
    } else if (cmd == "ricci_convention") {
      const Expr diff = canon(operand(step.operands[0]) - operand(step.operands[1]));
      std::vector<int> working;
      for (int sign : {1, -1}) {
        if (canon(rewrite_ricci(diff, table_, sign)).is_empty()) working.push_back(sign);
      }
      ++rep.assertions;
      if (working.size() == 1) {
        ricci_sign_ = working.front();
        rec.status = "pass";
        rec.detail = "unique convention " + convention_text(working.front());
      } else {
        rec.status = "FAIL";
        rec.detail = std::to_string(working.size()) + " conventions reproduce the identity";
        rec.residue = print_expr(canon(rewrite_ricci(diff, table_, 1)));
      }
    } else if (cmd == "impose_trace") {
      impose_trace(step, rec, rep);
    } else if (cmd == "assert_zero") {
      const Expr c = canon(operand(step.operands[0]));
      check(c.is_empty(), print_expr(c), rec, rep);
    } else if (cmd == "assert_nonzero") {
      const Expr c = canon(operand(step.operands[0]));
      check(!c.is_empty(), "expression vanishes identically", rec, rep);
      if (!c.is_empty()) rec.detail = std::to_string(c.terms().size()) + " canonical terms remain";
    } else if (cmd == "assert_equal") {
      Expr diff = operand(step.operands[0]) - operand(step.operands[1]);
      if (!step.words.empty()) diff = lambdas_named(step.words[0]).apply(diff);
      const Expr c = canon(diff);
      check(c.is_empty(), print_expr(c), rec, rep);
    } else if (cmd == "assert_proportional") {
      const Expr a = operand(step.operands[0]);
      const Expr b = operand(step.operands[1]);
      const auto ratio = proportionality(a, b, table_);
      check(ratio.has_value(), print_expr(canon(a)) + "  vs  " + print_expr(canon(b)), rec, rep);
      if (ratio) rec.detail = "ratio " + print_coefficient(*ratio);
    } else if (cmd == "assert_lambdas") {
      const auto& a = lambdas_named(step.words[0]);
      const auto failed = failed_relations(a);
      const Coefficient product = a.composite_p() * a.composite_s();
      const bool ok = failed.empty() && product == Coefficient::fraction(-1, 12);
      std::string residue;
      for (const auto& f : failed) residue += (residue.empty() ? "" : "; ") + f;
      check(ok, residue.empty() ? "composite product " + print_coefficient(product) : residue, rec, rep);
      rec.detail = "all relations vanish; composites " + print_coefficient(a.composite_p()) + " and " +
                   print_coefficient(a.composite_s()) + ", product " + print_coefficient(product);
    } else if (cmd == "oracle") {
      run_oracle(step, rec, rep);
    } else if (cmd == "final") {
      const Expr c = canon(operand(step.operands[0]));
      rep.final_term = print_expr(c);
      rec.detail = rep.final_term;
    } else if (cmd == "note") {
      rep.notes.push_back(step.args);
    } else {
      throw DerivationError("unknown command '" + cmd + "'");
    }
  }

  void impose_trace(const ScriptStep& step, StepRecord& rec, Report& rep) {
    const auto sym = table_.tensor(step.symbol);
    const int i = step.slots.first - 1;
    const int j = step.slots.second - 1;
    if (i < 0 || j < 0 || i >= sym->rank || j >= sym->rank || i == j)
      throw DerivationError("slot pair out of range for '" + step.symbol + "'");
    const Expr c = canon(operand(step.operands[0]));
    ++rep.assertions;
    bool ok = c.terms().size() == 1;
    if (ok) {
      const Term& t = c.terms().front();
      ok = t.factors.size() == 1 && t.factors.front().name() == step.symbol && t.factors.front().derivs.empty();
      if (ok) {
        const auto& s = t.factors.front().slots;
        ok = false;
        for (const auto& p : sym->group) {
          const auto a = static_cast<std::size_t>(p.image[static_cast<std::size_t>(i)]);
          const auto b = static_cast<std::size_t>(p.image[static_cast<std::size_t>(j)]);
          ok = ok || s[a].name == s[b].name;
        }
      }
    }
    if (!ok) {
      rec.status = "FAIL";
      rec.detail = "equation is not a nonzero multiple of the requested trace";
      rec.residue = print_expr(c);
      return;
    }
    table_.refine_tensor(with_traceless_pair(*sym, i, j));
    rec.status = "pass";
    rec.detail = print_expr(c) + " = 0, so the trace of " + step.symbol + " over slots (" +
                 std::to_string(step.slots.first) + "," + std::to_string(step.slots.second) + ") vanishes";
  }

  void run_oracle(const ScriptStep& step, StepRecord& rec, Report& rep) {
    OracleOptions o;
    o.dimension = table_.dimension();
    o.cyclic = !opt_.no_cyclic;
    o.ricci_sign = ricci_sign_.value_or(1);
    bool finding = false;
    for (const auto& w : step.words) {
      if (w == "flat") o.flat = true;
      else if (w == "neutral") o.neutral = true;
      else if (w == "no-cyclic") o.cyclic = false;
      else if (w == "finding") finding = true;
      else throw DerivationError("unknown oracle flag '" + w + "'");
    }
    int trials = 20;
    std::uint64_t seed = 1;
    const LambdaAssignment* lambdas = nullptr;
    std::map<std::string, Coefficient> fixed;
    for (const auto& [k, v] : step.options) {
      if (k == "trials") trials = std::stoi(v);
      else if (k == "seed") seed = std::stoull(v);
      else if (k == "lambdas") lambdas = &lambdas_named(v);
      else if (table_.is_scalar(k)) fixed[k] = scalar_value(v);
      else throw DerivationError("unknown oracle option '" + k + "'");
    }
    if (opt_.trials) trials = *opt_.trials;
    if (opt_.seed) seed = *opt_.seed;
    const Expr e = rebind(operand(step.operands[0]), table_);
    const OracleReport r = oracle_check(e, trials, seed, o, lambdas, fixed);
    std::string mode = o.flat ? "flat" : "curved";
    if (o.neutral) mode += ", neutral";
    if (!o.cyclic) mode += ", no cyclic identity";
    rec.detail = std::to_string(r.trials) + " exact trials, seed " + std::to_string(seed) + " (" + mode + ")";
    if (finding) {
      rec.status = "ok";
      rep.notes.push_back(step.name + ": " + (r.pass ? "identity holds" : "identity fails") + " in mode (" + mode + ")" +
                          (r.pass ? "" : ", witness " + r.witness));
      return;
    }
    check(r.pass, r.witness, rec, rep);
  }

  SymbolTable table_;
  EngineOptions opt_;
  std::map<std::string, Value> values_;
  std::optional<int> ricci_sign_;
};

inline Report run_script(std::string_view text, SymbolTable table = standard_symbols(), EngineOptions opt = {}) {
  Report rep;
  Script s;
  try {
    s = parse_script(text);
  } catch (const ParseError& err) {
    rep.passed = false;
    rep.parse_failure = true;
    rep.failed_step = "parse";
    rep.steps.push_back(StepRecord{0, "", "parse", "error", err.what(), "", 0});
    return rep;
  }
  Engine engine(std::move(table), std::move(opt));
  return engine.run(s);
}

/// Canonical form of every expression line in `text`. Lines starting with
/// `tensor`, `scalar` or `dimension` are declarations; `#` starts a comment.
inline std::vector<std::string> canonicalize_source(std::string_view text, SymbolTable table = standard_symbols()) {
  Engine engine(std::move(table));
  std::vector<std::string> out;
  for (const auto& logical : detail::logical_lines(text)) {
    const std::string body = detail::trim(logical.text);
    if (body.empty()) continue;
    const std::string first = body.substr(0, body.find_first_of(" \t"));
    if (first == "tensor" || first == "scalar" || first == "dimension") {
      const std::string padded = std::string(logical.offset, ' ') + logical.text;
      for (const auto& step : parse_script(padded).steps) engine.declare(step);
      continue;
    }
    const Expr e = parse_expr(logical.text, engine.table(), {}, logical.offset);
    out.push_back(print_expr(canonicalize(e, engine.table()).expr));
  }
  return out;
}

}  // namespace spintensor
