#include "proskill/property.hpp"

#include <cmath>
#include <stdexcept>

namespace proskill::check {

using ir::Expr;

std::string to_string(Property::Kind k) {
  switch (k) {
    case Property::Kind::Reachable: return "REACHABLE";
    case Property::Kind::Absent: return "ABSENT";
    case Property::Kind::DeadlockFree: return "DEADLOCK_FREE";
    case Property::Kind::LeadsToWithin: return "LEADSTO";
  }
  return "";
}

namespace {

[[noreturn]] void fail(const std::string& m) { throw std::invalid_argument(m); }

int resolve_var(const std::string& name, const ir::ProcessNetwork& net) {
  int v = net.var_index(name);
  if (v >= 0) return v;
  const auto dot = name.rfind('.');
  if (dot != std::string::npos) {
    std::string field = name.substr(dot + 1);
    if (field == "res") field = "val";
    v = net.var_index("skill[" + name.substr(0, dot) + "]." + field);
    if (v >= 0) return v;
  }
  fail("unknown variable " + name);
}

ir::Value resolve_value(const ir::VarDecl& d, const SExpr& e) {
  std::string text = e.text;
  if (d.kind == ir::VarKind::Bool) {
    if (text == "t") text = "true";
    if (text == "nil") text = "false";
  }
  auto v = d.parse(text);
  if (!v) fail(text + " is not a value of " + d.name);
  return *v;
}

}  // namespace

Expr parse_predicate(const SExpr& e, const ir::ProcessNetwork& net) {
  if (e.is_symbol()) {
    if (e.text == "t" || e.text == "true") return Expr::t();
    if (e.text == "nil" || e.text == "false") return Expr::f();
    const auto at = e.text.find('@');
    if (at == std::string::npos) fail("unexpected atom " + e.text);
    const int p = net.process_index(e.text.substr(0, at));
    if (p < 0) fail("unknown process in " + e.text);
    const int s = net.processes[p].state_index(e.text.substr(at + 1));
    if (s < 0) fail("unknown state in " + e.text);
    return Expr::at(p, s);
  }
  if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol())
    fail("malformed predicate " + to_string(e));
  const std::string& head = e.items[0].text;
  const std::size_t n = e.items.size();
  if (head == "not" || head == "~") {
    if (n != 2) fail("not takes one argument");
    return Expr::negate(parse_predicate(e.items[1], net));
  }
  if (head == "and" || head == "or") {
    std::vector<Expr> args;
    for (std::size_t i = 1; i < n; ++i) args.push_back(parse_predicate(e.items[i], net));
    return head == "and" ? Expr::conj(std::move(args)) : Expr::disj(std::move(args));
  }
  if (head == "=" || head == "/=" || head == "<" || head == "<=" || head == ">" || head == ">=") {
    if (n != 3 || !e.items[1].is_symbol()) fail("malformed comparison " + to_string(e));
    const int v = resolve_var(e.items[1].text, net);
    const ir::Value x = resolve_value(net.vars[v], e.items[2]);
    if (head == "=") return Expr::eq(v, x);
    if (head == "/=") return Expr::ne(v, x);
    if (head == "<") return Expr::lt(v, x);
    if (head == "<=") return Expr::le(v, x);
    if (head == ">") return Expr::negate(Expr::le(v, x));
    return Expr::negate(Expr::lt(v, x));
  }
  if (n == 1 && head.find('@') != std::string::npos) return parse_predicate(e.items[0], net);
  if (n == 2) {
    const int v = resolve_var(head, net);
    return Expr::eq(v, resolve_value(net.vars[v], e.items[1]));
  }
  fail("malformed predicate " + to_string(e));
}

Expr parse_predicate(std::string_view text, const ir::ProcessNetwork& net) {
  auto r = read_sexprs(text);
  if (has_errors(r.diagnostics)) fail("cannot read predicate: " + r.diagnostics.front().message);
  if (r.forms.size() != 1) fail("expected exactly one predicate");
  return parse_predicate(r.forms.front(), net);
}

namespace {

std::optional<ir::Value> parse_ticks(const SExpr& e, int tick_rate) {
  if (e.is_number()) {
    if (e.number < 0 || e.number != std::floor(e.number)) fail("ticks must be a natural number");
    return static_cast<ir::Value>(e.number);
  }
  if (e.is_symbol() && e.text.size() > 1 && e.text.back() == 's') {
    const std::string num = e.text.substr(0, e.text.size() - 1);
    char* end = nullptr;
    const double s = std::strtod(num.c_str(), &end);
    if (end && *end == '\0' && s >= 0) return translate::to_ticks(s, tick_rate);
  }
  return std::nullopt;
}

}  // namespace

std::vector<Property> parse_properties(std::string_view text, const ir::ProcessNetwork& net) {
  std::vector<Property> out;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    const std::string where = "properties line " + std::to_string(lineno) + ": ";
    try {
      auto r = read_sexprs(line);
      if (has_errors(r.diagnostics)) fail(r.diagnostics.front().message);
      auto& f = r.forms;
      if (f.empty()) continue;
      if (f.size() < 2 || !f[0].is_symbol() || !f[1].is_symbol()) fail("expected name and kind");
      Property p;
      p.name = f[0].text;
      const std::string& kind = f[1].text;
      std::size_t i = 2;
      auto take_pred = [&]() {
        if (i >= f.size()) fail("missing predicate");
        if (!p.text.empty()) p.text += " ";
        p.text += to_string(f[i]);
        return parse_predicate(f[i++], net);
      };
      if (kind == "REACHABLE" || kind == "ABSENT") {
        p.kind = kind == "REACHABLE" ? Property::Kind::Reachable : Property::Kind::Absent;
        p.p = take_pred();
      } else if (kind == "DEADLOCK_FREE") {
        p.kind = Property::Kind::DeadlockFree;
      } else if (kind == "LEADSTO" || kind == "LEADSTO_WITHIN") {
        p.kind = Property::Kind::LeadsToWithin;
        p.p = take_pred();
        p.q = take_pred();
        if (i >= f.size()) fail("LEADSTO needs a tick bound");
        auto t = parse_ticks(f[i++], net.tick_rate);
        if (!t) fail("malformed tick bound");
        p.ticks = *t;
      } else {
        fail("unknown property kind " + kind);
      }
      if (i < f.size() && f[i].is_symbol("expect")) {
        if (i + 1 >= f.size() || !f[i + 1].is_symbol()) fail("expect needs TRUE or FALSE");
        const std::string& v = f[i + 1].text;
        if (v != "TRUE" && v != "FALSE") fail("expect needs TRUE or FALSE");
        p.expect = v == "TRUE";
        i += 2;
      }
      if (i != f.size()) fail("trailing tokens");
      out.push_back(std::move(p));
    } catch (const std::invalid_argument& ex) {
      throw std::invalid_argument(where + ex.what());
    }
  }
  return out;
}

std::vector<Property> default_properties(const ast::SkillProgram& prog,
                                         const translate::TranslationUnit& unit) {
  const auto& net = unit.network;
  std::vector<Property> out;
  auto add = [&](std::string name, Property::Kind kind, Expr p, std::string text,
                 std::optional<bool> expect = std::nullopt) {
    Property prop;
    prop.name = std::move(name);
    prop.kind = kind;
    prop.p = std::move(p);
    prop.text = std::move(text);
    prop.expect = expect;
    out.push_back(std::move(prop));
  };
  using K = Property::Kind;
  for (const auto& sv : prog.state_vars) {
    if (!sv.enumerated) continue;
    const int p = net.process_index("sv_" + sv.name);
    add(sv.name + ".no_error", K::Absent, Expr::at(p, net.processes[p].state_index("error")),
        "sv_" + sv.name + "@error", true);
  }
  for (const auto& b : prog.basics) {
    const auto& r = net.records[net.record_index(b.name)];
    const std::string proc = "skill_" + b.name;
    const int p = net.process_index(proc);
    const int run = net.processes[p].state_index(unit.mode == translate::Mode::Check ? "run" : "action_sync");
    add(b.name + ".run", K::Reachable, Expr::at(p, run), proc + "@" + net.processes[p].states[run].name);
    auto outcome = [&](const ast::Outcome& o, ir::Value status, const std::string& kind) {
      const ir::Value val = *net.vars[r.val].parse(o.tag);
      add(b.name + "." + kind + "." + o.tag, K::Reachable,
          Expr::conj({Expr::eq(r.status, status), Expr::eq(r.val, val)}),
          "(and (= " + b.name + ".status " + kind + ") (= " + b.name + ".res " + o.tag + "))");
    };
    for (const auto& o : b.successes) outcome(o, ir::kSuccess, "success");
    for (const auto& o : b.failures) outcome(o, ir::kFailure, "failure");
    add(b.name + ".failed_inv", K::Reachable, Expr::eq(r.status, ir::kFailedInv),
        "(= " + b.name + ".status failed_inv)");
    add(b.name + ".interrupted", K::Reachable, Expr::eq(r.status, ir::kInterrupted),
        "(= " + b.name + ".status interrupted)");
  }
  for (const auto& c : prog.composites) {
    if (!c.time_interval) continue;
    const std::string proc = "skill_" + c.name + "_watchdog";
    const int p = net.process_index(proc);
    for (const char* s : {"undershoot", "overshoot"}) {
      const std::string state = std::string("skill_") + s;
      add(c.name + "." + s, K::Reachable, Expr::at(p, net.processes[p].state_index(state)),
          proc + "@" + state);
    }
  }
  add("deadlock_free", K::DeadlockFree, Expr::t(), "", true);
  return out;
}

std::vector<Property> default_properties(const ir::ProcessNetwork&) {
  Property p;
  p.name = "deadlock_free";
  p.kind = Property::Kind::DeadlockFree;
  p.expect = true;
  return {p};
}

}  // namespace proskill::check
