// spintensor: canonical forms, derivation scripts, the builtin reduction suite,
// lambda assignments and exact jet-oracle checks.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "spintensor/spintensor.hpp"

namespace st = spintensor;

namespace {

constexpr int kUsage = 2;

struct RunConfig {
  std::string input;
  std::string expr;
  std::string decl;
  std::string script;
  std::uint64_t seed = 1;
  int trials = 20;
  int dim = 4;
  std::vector<std::string> lambdas;
  std::vector<std::string> mutate;
  std::string format = "text";
  bool bianchi = false;
  bool no_cyclic = false;
  bool no_timings = false;
  bool flat = false;
  bool neutral = false;
  bool seed_set = false;
  bool trials_set = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, st::Coefficient> lambda_choices(const RunConfig& cfg) {
  std::map<std::string, st::Coefficient> out;
  const st::SymbolTable table = st::standard_symbols();
  for (const auto& kv : cfg.lambdas) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--lambda expects k=v, got '" + kv + "'");
    const st::Expr v = st::parse_expr(kv.substr(eq + 1), table);
    if (!v.is_scalar()) throw UsageError("--lambda value for '" + kv.substr(0, eq) + "' is not a scalar");
    out[kv.substr(0, eq)] = v.scalar_value();
  }
  return out;
}

st::EngineOptions engine_options(const RunConfig& cfg) {
  st::EngineOptions o;
  o.lambda_overrides = lambda_choices(cfg);
  if (cfg.trials_set) o.trials = cfg.trials;
  if (cfg.seed_set) o.seed = cfg.seed;
  o.no_cyclic = cfg.no_cyclic;
  o.bianchi = cfg.bianchi;
  return o;
}

int emit(const st::Report& r, const RunConfig& cfg) {
  if (cfg.format == "json") {
    std::cout << st::report_json(r, !cfg.no_timings).dump(2) << "\n";
  } else {
    std::cout << r.text(!cfg.no_timings);
  }
  if (!r.passed && !r.steps.empty()) {
    const auto& last = r.steps.back();
    std::cerr << "failed at '" << r.failed_step << "': " << (last.residue.empty() ? last.detail : "residue " + last.residue)
              << "\n";
  }
  return r.exit_code();
}

int cmd_canon(const RunConfig& cfg) {
  if (cfg.input.empty() == cfg.expr.empty()) throw UsageError("canon needs exactly one of <file> or --expr");
  std::string text = cfg.decl.empty() ? std::string() : read_file(cfg.decl) + "\n";
  const std::size_t shift = text.size();
  text += cfg.input.empty() ? cfg.expr : read_file(cfg.input);
  std::vector<std::string> lines;
  try {
    lines = st::canonicalize_source(text, st::standard_symbols(cfg.dim));
  } catch (const st::ParseError& e) {
    std::cerr << "parse error: " << e.what();
    if (shift > 0 && e.span().begin >= shift)
      std::cerr << " (input bytes [" << e.span().begin - shift << ", " << e.span().end - shift << "))";
    std::cerr << "\n";
    return kUsage;
  }
  if (cfg.format == "json") {
    std::cout << nlohmann::ordered_json(lines).dump(2) << "\n";
  } else {
    for (const auto& l : lines) std::cout << l << "\n";
  }
  return 0;
}

std::string mutated_suite(const RunConfig& cfg) {
  for (const auto& m : cfg.mutate) {
    try {
      (void)st::find_mutation(m);
    } catch (const st::Error& e) {
      throw UsageError(e.what());
    }
  }
  return st::suite_text(cfg.mutate);
}

int cmd_verify(const RunConfig& cfg) {
  return emit(st::run_script(read_file(cfg.input), st::standard_symbols(cfg.dim), engine_options(cfg)), cfg);
}

int cmd_suite(const RunConfig& cfg) {
  const std::string text = mutated_suite(cfg);
  return emit(st::run_script(text, st::standard_symbols(cfg.dim), engine_options(cfg)), cfg);
}

int cmd_mutations() {
  for (const auto& m : st::mutations())
    std::cout << m.name << "  (" << m.step << ") " << m.description << "; expected to fail at " << m.expected_failure
              << "\n";
  return 0;
}

int cmd_lambdas(const RunConfig& cfg) {
  const st::LambdaAssignment a = st::lambda_solve(lambda_choices(cfg));
  const auto failed = st::failed_relations(a);
  if (cfg.format == "json") {
    std::cout << st::assignment_json(a).dump(2) << "\n";
  } else {
    for (int k = 1; k <= 12; ++k) std::cout << "lam" << k << " = " << st::print_coefficient(a.at(k)) << "\n";
    std::cout << "lam9 lam12 = " << st::print_coefficient(a.at(9) * a.at(12)) << "\n";
    std::cout << "lam1 lam4 + lam2 lam6 = " << st::print_coefficient(a.composite_p()) << "\n";
    std::cout << "lam3 lam7 + lam5 lam8 = " << st::print_coefficient(a.composite_s()) << "\n";
    std::cout << "product = " << st::print_coefficient(a.composite_p() * a.composite_s()) << "\n";
    for (const auto& [name, rel] : st::lambda_relations())
      std::cout << "relation " << name << ": " << st::print_coefficient(a.apply(rel)) << "\n";
  }
  return failed.empty() ? 0 : 1;
}

/// Runs the script (builtin suite by default), then checks the named oracle
/// step again or, for a plain equation, checks that it vanishes.
int cmd_oracle(const RunConfig& cfg) {
  const std::string text = cfg.script.empty() ? mutated_suite(cfg) : read_file(cfg.script);
  st::Script script;
  try {
    script = st::parse_script(text);
  } catch (const st::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  }
  const auto target = std::find_if(script.steps.begin(), script.steps.end(),
                                   [&](const st::ScriptStep& s) { return s.name == cfg.input; });
  if (target == script.steps.end()) throw UsageError("no step named '" + cfg.input + "'");
  const st::ScriptStep step = *target;
  const bool is_oracle = step.command == "oracle";
  script.steps.erase(target + (is_oracle ? 0 : 1), script.steps.end());
  // Only the definitions leading up to the step; checks are left to verify.
  std::erase_if(script.steps, [](const st::ScriptStep& s) {
    return s.command == "oracle" || s.command.rfind("assert_", 0) == 0;
  });

  st::EngineOptions o = engine_options(cfg);
  o.trials = cfg.trials;
  o.seed = cfg.seed;
  st::Engine engine(st::standard_symbols(cfg.dim), o);
  st::Report prefix = engine.run(script);
  if (!prefix.passed) return emit(prefix, cfg);

  auto operand = [](const st::Operand& op) { return op.is_ref ? "@" + op.text : "(" + op.text + ")"; };
  std::string line = (is_oracle ? cfg.input : "numeric_" + cfg.input) + ": oracle ";
  if (is_oracle) {
    line += step.operands.at(0).text;
    for (const auto& w : step.words) line += " " + w;
    for (const auto& [k, v] : step.options) {
      if (k != "trials" && k != "seed") line += " " + k + "=" + v;
    }
  } else if (step.command == "assert_equal") {
    line += operand(step.operands.at(0)) + " - " + operand(step.operands.at(1));
    if (!step.words.empty()) line += " lambdas=" + step.words.front();
  } else if (step.command == "assert_zero") {
    line += operand(step.operands.at(0));
  } else if (st::detail::producing_commands().contains(step.command) && step.command != "lambdas") {
    line += "@" + cfg.input;
  } else {
    throw UsageError("step '" + cfg.input + "' (" + step.command + ") has no equation to check");
  }
  if (cfg.flat) line += " flat";
  if (cfg.neutral) line += " neutral";
  const st::Report r = engine.run(st::parse_script(line, engine.names()));
  return emit(r, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic tensor calculus for first-order spin-2 systems, with an exact jet oracle."};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool derivation) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--dim", cfg.dim, "Spacetime dimension")->check(CLI::Range(2, 8));
    if (!derivation) return;
    sub->add_option("--seed", cfg.seed, "Oracle seed (overrides every oracle step)")
        ->each([&](const std::string&) { cfg.seed_set = true; });
    sub->add_option("--trials", cfg.trials, "Oracle trials (overrides every oracle step)")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { cfg.trials_set = true; });
    sub->add_option("--lambda", cfg.lambdas, "Lambda pivot choice k=v (repeatable)");
    sub->add_flag("--bianchi", cfg.bianchi, "Apply the first-Bianchi rewrite before comparisons");
    sub->add_flag("--no-cyclic", cfg.no_cyclic, "Sample curvature without the cyclic identity");
    sub->add_flag("--no-timings", cfg.no_timings, "Omit timing fields");
  };

  auto* canon = app.add_subcommand("canon", "Print the canonical form of each expression line");
  canon->add_option("file", cfg.input, "Expression file (declaration lines allowed)");
  canon->add_option("--expr", cfg.expr, "Inline expression");
  canon->add_option("--decl", cfg.decl, "Declaration file read before the input");
  common(canon, false);

  auto* verify = app.add_subcommand("verify", "Run a derivation script");
  verify->add_option("script", cfg.input, "Script file")->required();
  common(verify, true);

  auto* suite = app.add_subcommand("paper-suite", "Run the builtin reduction suite");
  suite->add_option("--mutate", cfg.mutate, "Apply a named mutation (repeatable)");
  bool list = false;
  suite->add_flag("--list-mutations", list, "List the available mutations");
  common(suite, true);

  auto* lambdas = app.add_subcommand("solve-lambdas", "Print an exact lambda assignment");
  lambdas->add_option("--lambda", cfg.lambdas, "Pivot choice k=v (repeatable)");
  common(lambdas, false);

  auto* oracle = app.add_subcommand("oracle", "Exact jet-oracle check of a suite equation or oracle step");
  oracle->add_option("eq", cfg.input, "Step name")->required();
  oracle->add_option("--script", cfg.script, "Script defining the step (default: builtin suite)");
  oracle->add_option("--mutate", cfg.mutate, "Apply a named mutation to the builtin suite");
  oracle->add_flag("--flat", cfg.flat, "Flat geometry");
  oracle->add_flag("--neutral", cfg.neutral, "Zero field strength");
  common(oracle, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*canon) return cmd_canon(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*suite) return list ? cmd_mutations() : cmd_suite(cfg);
    if (*lambdas) return cmd_lambdas(cfg);
    if (*oracle) return cmd_oracle(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const st::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const st::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
