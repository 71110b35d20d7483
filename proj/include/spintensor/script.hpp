#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spintensor/error.hpp"
#include "spintensor/tensor_ir.hpp"

namespace spintensor {

/// Argument that is either a reference to an earlier step or inline expression text.
struct Operand {
  std::string text;
  std::size_t offset = 0;  ///< byte offset of `text` in the script
  bool is_ref = false;
};

/// One line of a script. Directives (tensor, scalar, dimension) have no name.
struct ScriptStep {
  std::size_t line = 0;
  Span span;
  std::string name;
  std::string command;
  std::string args;
  std::vector<Operand> operands;
  std::vector<std::string> words;                            ///< plain names (rules, tensors, flags, ...)
  std::vector<std::pair<std::string, std::string>> options;  ///< k=v settings or a->c renamings
  std::string symbol;
  std::pair<int, int> slots{0, 0};  ///< 1-based slot pair for impose_trace
};

struct Script {
  std::vector<ScriptStep> steps;
};

/// Tensor declaration parsed from
/// `tensor NAME rank=N sym=(-21,+3412) traceless=(12) cyclic=(234) charge=e role=field`.
struct TensorDecl {
  std::string name;
  int rank = 0;
  std::vector<SignedPermutation> generators;
  std::vector<std::pair<int, int>> traceless;
  std::vector<std::array<int, 3>> cyclic;
  std::string charge = "0";
  TensorRole role = TensorRole::field;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool is_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
  }
  return true;
}

/// Pieces of `s` separated by top-level commas, with their offsets.
inline std::vector<std::pair<std::string, std::size_t>> split_top(std::string_view s, std::size_t offset, char sep = ',') {
  std::vector<std::pair<std::string, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  auto push = [&](std::size_t end) {
    std::size_t b = start;
    while (b < end && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    std::string piece = trim(s.substr(b, end - b));
    if (!piece.empty()) out.emplace_back(piece, offset + b);
  };
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char c = s[k];
    if (c == '(' || c == '{') ++depth;
    if (c == ')' || c == '}') --depth;
    if (c == sep && depth == 0) {
      push(k);
      start = k + 1;
    }
  }
  push(s.size());
  return out;
}

/// Whitespace-separated words with their offsets.
inline std::vector<std::pair<std::string, std::size_t>> split_words(std::string_view s, std::size_t offset) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    const std::size_t b = k;
    while (k < s.size() && !std::isspace(static_cast<unsigned char>(s[k]))) ++k;
    if (k > b) out.emplace_back(std::string(s.substr(b, k - b)), offset + b);
  }
  return out;
}

inline Operand make_operand(const std::string& text, std::size_t offset) {
  return Operand{text, offset, is_name(text)};
}

/// Names referenced with '@' inside expression text.
inline std::vector<std::pair<std::string, std::size_t>> at_references(const Operand& op) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (std::size_t k = 0; k < op.text.size(); ++k) {
    if (op.text[k] != '@') continue;
    std::size_t e = k + 1;
    while (e < op.text.size() && (std::isalnum(static_cast<unsigned char>(op.text[e])) || op.text[e] == '_' ||
                                  op.text[e] == '\''))
      ++e;
    out.emplace_back(op.text.substr(k + 1, e - k - 1), op.offset + k);
  }
  return out;
}

inline const std::set<std::string>& producing_commands() {
  static const std::set<std::string> kSet = {"define",  "combine", "rule",   "solve",        "substitute", "lambdas",
                                             "constrain", "specialize", "zero", "normal_order", "ricci",      "canon",
                                             "bianchi", "relabel", "project"};
  return kSet;
}

inline const std::set<std::string>& known_commands() {
  static const std::set<std::string> kSet = [] {
    std::set<std::string> s = producing_commands();
    for (const char* c : {"ricci_convention", "impose_trace", "assert_zero", "assert_nonzero", "assert_equal",
                          "assert_proportional", "assert_lambdas", "oracle", "final", "note"})
      s.insert(c);
    return s;
  }();
  return kSet;
}

struct LogicalLine {
  std::size_t offset = 0;
  std::size_t line = 0;
  std::string text;  ///< same length as the source slice; comments and continuations blanked
};

/// Joins lines ending in '\\' with the next one and blanks '#' comments,
/// keeping byte offsets intact.
inline std::vector<LogicalLine> logical_lines(std::string_view text) {
  std::vector<LogicalLine> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool continuing = false;
  while (pos < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string piece(text.substr(pos, end - pos));
    if (auto hash = piece.find('#'); hash != std::string::npos) std::fill(piece.begin() + static_cast<long>(hash), piece.end(), ' ');
    bool cont = false;
    const auto last = piece.find_last_not_of(" \t\r");
    if (last != std::string::npos && piece[last] == '\\') {
      piece[last] = ' ';
      cont = true;
    }
    if (!continuing) out.push_back(LogicalLine{pos, line_no, {}});
    out.back().text += piece;
    if (end < text.size()) out.back().text += ' ';
    continuing = cont;
    pos = end + 1;
  }
  return out;
}

inline std::vector<int> parse_slot_digits(const std::string& s, Span span) {
  std::vector<int> out;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)) || c == '0') throw ParseError("slot lists use digits 1-9", span);
    out.push_back(c - '1');
  }
  return out;
}

}  // namespace detail

inline TensorDecl parse_tensor_declaration(std::string_view args, std::size_t offset = 0) {
  TensorDecl decl;
  const auto words = detail::split_words(args, offset);
  if (words.empty()) throw ParseError("tensor declaration needs a name", Span{offset, offset + args.size()});
  decl.name = words[0].first;
  if (!detail::is_name(decl.name)) throw ParseError("bad tensor name '" + decl.name + "'", Span{words[0].second, words[0].second + decl.name.size()});
  bool have_rank = false;
  for (std::size_t k = 1; k < words.size(); ++k) {
    const auto& [w, off] = words[k];
    const Span span{off, off + w.size()};
    const auto eq = w.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in tensor declaration", span);
    const std::string key = w.substr(0, eq);
    std::string value = w.substr(eq + 1);
    auto list = [&]() {
      if (value.size() < 2 || value.front() != '(' || value.back() != ')') throw ParseError("expected a parenthesized list", span);
      std::vector<std::string> items;
      for (auto& [item, o] : detail::split_top(std::string_view(value).substr(1, value.size() - 2), 0)) items.push_back(item);
      return items;
    };
    if (key == "rank") {
      try {
        decl.rank = std::stoi(value);
      } catch (const std::exception&) {
        throw ParseError("bad rank", span);
      }
      have_rank = true;
    } else if (key == "sym") {
      for (const auto& item : list()) {
        if (item.size() < 2 || (item[0] != '+' && item[0] != '-')) throw ParseError("symmetry generators look like -21 or +3412", span);
        SignedPermutation p;
        p.sign = item[0] == '-' ? -1 : 1;
        p.image = detail::parse_slot_digits(item.substr(1), span);
        decl.generators.push_back(std::move(p));
      }
    } else if (key == "traceless") {
      for (const auto& item : list()) {
        auto s = detail::parse_slot_digits(item, span);
        if (s.size() != 2) throw ParseError("traceless pairs have two slots", span);
        decl.traceless.emplace_back(s[0], s[1]);
      }
    } else if (key == "cyclic") {
      for (const auto& item : list()) {
        auto s = detail::parse_slot_digits(item, span);
        if (s.size() != 3) throw ParseError("cyclic triples have three slots", span);
        decl.cyclic.push_back({s[0], s[1], s[2]});
      }
    } else if (key == "charge") {
      decl.charge = value;
    } else if (key == "role") {
      if (value == "field") decl.role = TensorRole::field;
      else if (value == "metric") decl.role = TensorRole::metric;
      else if (value == "riemann") decl.role = TensorRole::riemann;
      else if (value == "ricci") decl.role = TensorRole::ricci;
      else if (value == "field_strength") decl.role = TensorRole::field_strength;
      else throw ParseError("unknown role '" + value + "'", span);
    } else {
      throw ParseError("unknown declaration key '" + key + "'", span);
    }
  }
  if (!have_rank) throw ParseError("tensor declaration needs rank=N", Span{offset, offset + args.size()});
  return decl;
}

/// Parses a line-oriented script. Every reference must name an earlier
/// value-producing step; step names are unique.
inline Script parse_script(std::string_view text, const std::set<std::string>& predefined = {}) {
  Script script;
  std::set<std::string> defined = predefined;
  std::set<std::string> labels;
  for (const auto& logical : detail::logical_lines(text)) {
    const std::string_view line = logical.text;
    const std::size_t base = logical.offset;
    const std::size_t line_no = logical.line;
    if (detail::trim(line).empty()) continue;
    ScriptStep step;
    step.line = line_no;
    step.span = Span{base, base + line.size()};

    std::size_t k = 0;
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    std::size_t e = k;
    while (e < line.size() && !std::isspace(static_cast<unsigned char>(line[e])) && line[e] != ':') ++e;
    const std::string first(line.substr(k, e - k));
    std::size_t after = e;
    while (after < line.size() && std::isspace(static_cast<unsigned char>(line[after]))) ++after;
    if (after < line.size() && line[after] == ':') {
      step.name = first;
      if (!detail::is_name(step.name)) throw ParseError("bad step name '" + step.name + "'", Span{base + k, base + e});
      if (labels.contains(step.name)) throw ParseError("duplicate step name '" + step.name + "'", Span{base + k, base + e});
      labels.insert(step.name);
      k = after + 1;
      while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
      e = k;
      while (e < line.size() && !std::isspace(static_cast<unsigned char>(line[e]))) ++e;
      step.command = std::string(line.substr(k, e - k));
    } else {
      step.command = first;
      if (step.command != "tensor" && step.command != "scalar" && step.command != "dimension" && step.command != "note")
        throw ParseError("expected 'name: command ...' or a declaration", Span{base + k, base + e});
    }
    if (!step.name.empty() && !detail::known_commands().contains(step.command))
      throw ParseError("unknown command '" + step.command + "'", Span{base + k, base + e});
    const std::size_t args_off = base + e;
    const std::string_view args = line.substr(e);
    step.args = detail::trim(args);
    const Span args_span{args_off, args_off + args.size()};
    const auto words = detail::split_words(args, args_off);
    const std::string& cmd = step.command;

    auto need = [&](bool ok, const std::string& what) {
      if (!ok) throw ParseError("malformed '" + cmd + "' step: " + what, args_span);
    };
    auto rest_after = [&](std::size_t word_index) -> std::pair<std::string, std::size_t> {
      if (word_index >= words.size()) return {"", args_off + args.size()};
      const std::size_t off = words[word_index].second;
      return {detail::trim(line.substr(off - base, args_off + args.size() - off)), off};
    };

    if (cmd == "dimension") {
      need(words.size() == 1, "expected one integer");
    } else if (cmd == "scalar") {
      need(!words.empty(), "expected scalar names");
      for (const auto& [w, o] : words) step.words.push_back(w);
    } else if (cmd == "tensor") {
      (void)parse_tensor_declaration(args, args_off);
    } else if (cmd == "define" || cmd == "combine" || cmd == "final" || cmd == "assert_zero" || cmd == "assert_nonzero" ||
               cmd == "normal_order" || cmd == "ricci" || cmd == "canon" || cmd == "bianchi") {
      need(!step.args.empty(), "expected an expression or reference");
      step.operands.push_back(detail::make_operand(step.args, words.front().second));
    } else if (cmd == "rule") {
      const auto parts = detail::split_top(args, args_off, '=');
      need(parts.size() == 2, "expected PATTERN = EXPRESSION");
      step.operands.push_back(Operand{parts[0].first, parts[0].second, false});
      step.operands.push_back(Operand{parts[1].first, parts[1].second, false});
    } else if (cmd == "solve") {
      need(words.size() == 2, "expected EQUATION SYMBOL");
      step.operands.push_back(detail::make_operand(words[0].first, words[0].second));
      step.symbol = words[1].first;
    } else if (cmd == "substitute") {
      need(words.size() >= 2, "expected TARGET RULE[, RULE ...]");
      step.operands.push_back(detail::make_operand(words[0].first, words[0].second));
      auto [rest, off] = rest_after(1);
      for (auto& [r, o] : detail::split_top(rest, off)) {
        need(detail::is_name(r), "rules are referenced by name");
        step.words.push_back(r);
      }
    } else if (cmd == "lambdas") {
      for (const auto& [w, o] : words) {
        const auto eq = w.find('=');
        need(eq != std::string::npos, "expected lamK=value");
        step.options.emplace_back(w.substr(0, eq), w.substr(eq + 1));
      }
    } else if (cmd == "constrain") {
      need(words.size() == 3 && words[1].first == "with", "expected EQUATION with ASSIGNMENT");
      step.operands.push_back(detail::make_operand(words[0].first, words[0].second));
      step.words.push_back(words[2].first);
    } else if (cmd == "specialize" || cmd == "relabel") {
      need(words.size() >= 2, "expected EQUATION followed by settings");
      step.operands.push_back(detail::make_operand(words[0].first, words[0].second));
      auto [rest, off] = rest_after(1);
      const std::string sep = cmd == "relabel" ? "->" : "=";
      for (auto& [item, o] : detail::split_top(rest, off)) {
        const auto pos = item.find(sep);
        need(pos != std::string::npos, "expected items of the form x" + sep + "y");
        step.options.emplace_back(detail::trim(item.substr(0, pos)), detail::trim(item.substr(pos + sep.size())));
      }
    } else if (cmd == "zero") {
      need(words.size() >= 2, "expected EQUATION TENSOR...");
      step.operands.push_back(detail::make_operand(words[0].first, words[0].second));
      for (std::size_t w = 1; w < words.size(); ++w) step.words.push_back(words[w].first);
    } else if (cmd == "project") {
      need(words.size() >= 3, "expected EQUATION MODE INDEX...");
      step.operands.push_back(detail::make_operand(words[0].first, words[0].second));
      for (std::size_t w = 1; w < words.size(); ++w) step.words.push_back(words[w].first);
      need(step.words[0] == "sym" || step.words[0] == "antisym" || step.words[0] == "traceless",
           "mode is sym, antisym or traceless");
    } else if (cmd == "ricci_convention" || cmd == "assert_equal" || cmd == "assert_proportional") {
      std::string body = step.args;
      std::size_t body_off = words.empty() ? args_off : words.front().second;
      if (cmd == "assert_equal") {
        const auto under = body.rfind(" under ");
        if (under != std::string::npos) {
          const std::string who = detail::trim(body.substr(under + 7));
          need(detail::is_name(who), "expected an assignment name after 'under'");
          step.words.push_back(who);
          body = body.substr(0, under);
        }
      }
      auto parts = detail::split_top(body, body_off);
      need(parts.size() == 2, "expected two comma-separated operands");
      for (auto& [p, o] : parts) step.operands.push_back(detail::make_operand(p, o));
    } else if (cmd == "impose_trace") {
      // SYMBOL (i,j) by EQUATION
      need(words.size() == 4 && words[2].first == "by", "expected SYMBOL (i,j) by EQUATION");
      step.symbol = words[0].first;
      const std::string& pr = words[1].first;
      const Span pspan{words[1].second, words[1].second + pr.size()};
      need(pr.size() == 5 && pr[0] == '(' && pr[2] == ',' && pr[4] == ')', "slot pair looks like (1,3)");
      auto s = detail::parse_slot_digits(std::string{pr[1], pr[3]}, pspan);
      step.slots = {s[0] + 1, s[1] + 1};
      step.operands.push_back(detail::make_operand(words[3].first, words[3].second));
    } else if (cmd == "assert_lambdas") {
      need(words.size() == 1, "expected an assignment name");
      step.words.push_back(words[0].first);
    } else if (cmd == "oracle") {
      // EXPRESSION [flag | key=value]...; trailing settings are peeled off the end.
      std::size_t cut = words.size();
      while (cut > 1) {
        const std::string& item = words[cut - 1].first;
        const auto eq = item.find('=');
        const bool setting = eq != std::string::npos ? detail::is_name(item.substr(0, eq))
                                                     : (item == "flat" || item == "neutral" || item == "no-cyclic" ||
                                                        item == "finding");
        if (!setting) break;
        --cut;
      }
      need(cut >= 1, "expected an equation");
      const std::size_t expr_end = cut < words.size() ? words[cut].second : args_off + args.size();
      const std::size_t expr_off = words[0].second;
      step.operands.push_back(detail::make_operand(detail::trim(line.substr(expr_off - base, expr_end - expr_off)), expr_off));
      for (std::size_t w = cut; w < words.size(); ++w) {
        const auto& item = words[w].first;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          step.words.push_back(item);
        } else {
          step.options.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
      }
    }

    // Reference resolution.
    auto check_ref = [&](const std::string& name, std::size_t off) {
      if (!defined.contains(name))
        throw ParseError("undefined reference '" + name + "'", Span{off, off + name.size()});
    };
    for (const auto& op : step.operands) {
      if (op.is_ref) {
        check_ref(op.text, op.offset);
      } else {
        for (const auto& [r, off] : detail::at_references(op)) check_ref(r, off + 1);
      }
    }
    if (cmd == "substitute" || cmd == "constrain" || cmd == "assert_lambdas" ||
        (cmd == "assert_equal" && !step.words.empty())) {
      for (const auto& w : step.words) {
        const auto off = step.args.find(w);
        check_ref(w, args_off + (off == std::string::npos ? 0 : off));
      }
    }
    if (!step.name.empty() && detail::producing_commands().contains(cmd)) defined.insert(step.name);
    script.steps.push_back(std::move(step));
  }
  return script;
}

}  // namespace spintensor
