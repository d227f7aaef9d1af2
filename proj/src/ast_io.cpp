#include "proskill/ast_io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <sstream>

namespace proskill::ast {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

namespace {

json loc_json(SourceLoc l) { return json::array({l.line, l.column}); }

json cond_json(const Condition& c) {
  return {{"sv", c.sv}, {"value", c.value}, {"negated", c.negated}};
}

json assigns_json(const std::vector<Assign>& as) {
  json out = json::array();
  for (const auto& a : as) out.push_back({{"sv", a.sv}, {"value", a.value}});
  return out;
}

json outcomes_json(const std::vector<Outcome>& os) {
  json out = json::array();
  for (const auto& o : os) {
    json post = json::array();
    for (const auto& c : o.postcondition) post.push_back(cond_json(c));
    out.push_back({{"tag", o.tag}, {"effects", assigns_json(o.effects)}, {"postcondition", post}});
  }
  return out;
}

json pre_json(const std::vector<TaggedCondition>& tcs) {
  json out = json::array();
  for (const auto& t : tcs) out.push_back({{"tag", t.tag}, {"cond", cond_json(t.cond)}});
  return out;
}

json params_json(const std::vector<Param>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back({{"name", p.name}, {"type", p.type}});
  return out;
}

json interval_json(const std::optional<TimeInterval>& ti) {
  if (!ti) return nullptr;
  return json::array({ti->min, ti->max});
}

json interrupt_json(const std::optional<InterruptClause>& ic) {
  if (!ic) return nullptr;
  return {{"effects", assigns_json(ic->effects)}};
}

const char* test_kind(Test::Kind k) {
  switch (k) {
    case Test::Kind::SvEq: return "sv_eq";
    case Test::Kind::SkillField: return "skill_field";
    case Test::Kind::And: return "and";
    case Test::Kind::Or: return "or";
    case Test::Kind::Not: return "not";
    case Test::Kind::True: return "true";
    case Test::Kind::False: return "false";
  }
  return "?";
}

json test_json(const Test& t) {
  json j = {{"kind", test_kind(t.kind)}};
  if (!t.name.empty()) j["name"] = t.name;
  if (!t.field.empty()) j["field"] = t.field;
  if (!t.value.empty()) j["value"] = t.value;
  if (!t.args.empty()) {
    j["args"] = json::array();
    for (const auto& a : t.args) j["args"].push_back(test_json(a));
  }
  return j;
}

json body_json(const std::vector<Instruction>& body);

json instr_json(const Instruction& ins) {
  using K = Instruction::Kind;
  json j = {{"kind", to_string(ins.kind)}, {"loc", loc_json(ins.loc)}};
  switch (ins.kind) {
    case K::Call: {
      j["skill"] = ins.name;
      json args = json::array();
      for (const auto& a : ins.args) args.push_back({{"name", a.name}, {"value", a.text}});
      j["args"] = args;
      break;
    }
    case K::If:
      j["test"] = test_json(ins.test);
      j["then"] = body_json(ins.body);
      j["else"] = body_json(ins.else_body);
      break;
    case K::While:
    case K::DoUntil:
      j["test"] = test_json(ins.test);
      j["body"] = body_json(ins.body);
      break;
    case K::WaitCond: j["test"] = test_json(ins.test); break;
    case K::WaitTime: j["seconds"] = ins.seconds; break;
    case K::Parallel: {
      json brs = json::array();
      for (const auto& b : ins.branches) brs.push_back(body_json(b));
      j["branches"] = brs;
      break;
    }
    case K::Printf: j["text"] = ins.name; break;
    case K::Success:
    case K::Failure: j["tag"] = ins.name; break;
    case K::Interrupt: j["skill"] = ins.name; break;
    case K::Goto:
    case K::Label: j["label"] = ins.name; break;
  }
  return j;
}

json body_json(const std::vector<Instruction>& body) {
  json out = json::array();
  for (const auto& i : body) out.push_back(instr_json(i));
  return out;
}

}  // namespace

json to_json(const SkillProgram& prog) {
  json svs = json::array(), evs = json::array(), basics = json::array(),
       comps = json::array();
  for (const auto& sv : prog.state_vars) {
    json j = {{"name", sv.name}, {"loc", loc_json(sv.loc)}, {"init", sv.init}};
    if (sv.enumerated) {
      j["kind"] = "enumerated";
      j["values"] = sv.values;
      if (sv.all_transitions) {
        j["transitions"] = "all";
      } else {
        json tr = json::array();
        for (const auto& [a, b] : sv.transitions) tr.push_back({a, b});
        j["transitions"] = tr;
      }
    } else {
      j["kind"] = "natural";
      j["min"] = sv.min;
      j["max"] = sv.max;
    }
    svs.push_back(j);
  }
  for (const auto& ev : prog.events)
    evs.push_back({{"name", ev.name}, {"loc", loc_json(ev.loc)}, {"effects", assigns_json(ev.effects)}});
  for (const auto& sk : prog.basics) {
    json inv = json::array();
    for (const auto& i : sk.invariants)
      inv.push_back({{"tag", i.tag}, {"guard", cond_json(i.guard)}, {"effects", assigns_json(i.effects)}});
    basics.push_back({{"name", sk.name},
                      {"loc", loc_json(sk.loc)},
                      {"input", params_json(sk.inputs)},
                      {"precondition", pre_json(sk.precondition)},
                      {"start", assigns_json(sk.start)},
                      {"invariant", inv},
                      {"time_interval", interval_json(sk.time_interval)},
                      {"action", sk.action},
                      {"interrupt", interrupt_json(sk.interrupt)},
                      {"success", outcomes_json(sk.successes)},
                      {"failure", outcomes_json(sk.failures)}});
  }
  for (const auto& sk : prog.composites) {
    comps.push_back({{"name", sk.name},
                     {"loc", loc_json(sk.loc)},
                     {"monitor", sk.monitor},
                     {"input", params_json(sk.inputs)},
                     {"precondition", pre_json(sk.precondition)},
                     {"start", assigns_json(sk.start)},
                     {"time_interval", interval_json(sk.time_interval)},
                     {"interrupt", interrupt_json(sk.interrupt)},
                     {"success", outcomes_json(sk.successes)},
                     {"failure", outcomes_json(sk.failures)},
                     {"body", body_json(sk.body)}});
  }
  json j = {{"state_vars", svs}, {"events", evs}, {"basic_skills", basics},
            {"composite_skills", comps}};
  j["entry"] = prog.entry ? json(*prog.entry) : json(nullptr);
  json cg = json::object();
  for (const auto& [k, v] : prog.call_graph) cg[k] = v;
  j["call_graph"] = cg;
  return j;
}

// ---- pretty printer ----

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string cond_src(const Condition& c) {
  std::string base = "(" + c.sv + " " + c.value + ")";
  return c.negated ? "(~ " + base + ")" : base;
}

std::string assigns_src(const std::vector<Assign>& as) {
  std::string out = "(";
  for (const auto& a : as) out += "(" + a.sv + " " + a.value + ")";
  return out + ")";
}

std::string conds_src(const std::vector<Condition>& cs) {
  std::string out = "(";
  for (std::size_t i = 0; i < cs.size(); ++i) out += (i ? " " : "") + cond_src(cs[i]);
  return out + ")";
}

std::string test_src(const Test& t) {
  switch (t.kind) {
    case Test::Kind::SvEq: return "(" + t.name + " " + t.value + ")";
    case Test::Kind::SkillField: return "(= " + t.name + "." + t.field + " " + t.value + ")";
    case Test::Kind::Not: return "(~ " + test_src(t.args.at(0)) + ")";
    case Test::Kind::And:
    case Test::Kind::Or: {
      std::string out = t.kind == Test::Kind::And ? "(and" : "(or";
      for (const auto& a : t.args) out += " " + test_src(a);
      return out + ")";
    }
    case Test::Kind::True: return "t";
    case Test::Kind::False: return "nil";
  }
  return "t";
}

void body_src(std::ostream& out, const std::vector<Instruction>& body, int indent);

void instr_src(std::ostream& out, const Instruction& ins, int indent) {
  using K = Instruction::Kind;
  const std::string pad(indent, ' ');
  out << pad;
  switch (ins.kind) {
    case K::Call:
      out << "(" << ins.name;
      for (const auto& a : ins.args) out << " " << a.name << " " << a.text;
      out << ")";
      break;
    case K::WaitCond: out << "(^ " << test_src(ins.test) << ")"; break;
    case K::WaitTime: out << "(^ " << format_number(ins.seconds) << ")"; break;
    case K::Printf: out << "(printf " << quote(ins.name) << ")"; break;
    case K::Success: out << "(success " << ins.name << ")"; break;
    case K::Failure: out << "(failure " << ins.name << ")"; break;
    case K::Interrupt: out << "(" << ins.name << ".interrupt)"; break;
    case K::Goto: out << "(goto " << ins.name << ")"; break;
    case K::Label: out << "(label " << ins.name << ")"; break;
    case K::If:
    case K::While:
      out << (ins.kind == K::If ? "(if " : "(while ") << test_src(ins.test) << "\n";
      body_src(out, ins.body, indent + 2);
      if (!ins.else_body.empty()) {
        out << pad << "  :else\n";
        body_src(out, ins.else_body, indent + 2);
      }
      out << pad << ")";
      break;
    case K::DoUntil:
      out << "(do\n";
      body_src(out, ins.body, indent + 2);
      out << pad << "  :until " << test_src(ins.test) << ")";
      break;
    case K::Parallel:
      out << "(//\n";
      for (const auto& br : ins.branches) {
        out << pad << "  (\n";
        body_src(out, br, indent + 4);
        out << pad << "  )\n";
      }
      out << pad << ")";
      break;
  }
  out << "\n";
}

void body_src(std::ostream& out, const std::vector<Instruction>& body, int indent) {
  for (const auto& ins : body) instr_src(out, ins, indent);
}

void outcomes_src(std::ostream& out, const char* key, const std::vector<Outcome>& os) {
  if (os.empty()) return;
  out << "  " << key << " (";
  for (std::size_t i = 0; i < os.size(); ++i) {
    const auto& o = os[i];
    out << (i ? " " : "") << o.tag << " (:effects " << assigns_src(o.effects)
        << " :postcondition " << conds_src(o.postcondition) << ")";
  }
  out << ")\n";
}

void common_src(std::ostream& out, const std::vector<Param>& inputs,
                const std::vector<TaggedCondition>& pre, const std::vector<Assign>& start,
                const std::optional<TimeInterval>& ti) {
  if (!inputs.empty()) {
    out << "  :input (";
    for (std::size_t i = 0; i < inputs.size(); ++i)
      out << (i ? " " : "") << "$" << inputs[i].name << " " << inputs[i].type;
    out << ")\n";
  }
  if (!pre.empty()) {
    out << "  :precondition (";
    for (std::size_t i = 0; i < pre.size(); ++i)
      out << (i ? " " : "") << pre[i].tag << " " << cond_src(pre[i].cond);
    out << ")\n";
  }
  if (!start.empty()) out << "  :start " << assigns_src(start) << "\n";
  if (ti) out << "  :time_interval [" << format_number(ti->min) << ", " << format_number(ti->max) << "]\n";
}

}  // namespace

std::string pretty_print(const SkillProgram& prog) {
  std::ostringstream out;
  for (const auto& [kind, idx] : prog.order) {
    switch (kind) {
      case DefKind::StateVar: {
        const auto& sv = prog.state_vars[idx];
        out << "(defsv " << sv.name << "\n";
        if (sv.enumerated) {
          out << "  :states (";
          for (std::size_t i = 0; i < sv.values.size(); ++i) out << (i ? " " : "") << sv.values[i];
          out << ")\n  :init " << sv.init << "\n  :transitions ";
          if (sv.all_transitions) {
            out << ":all";
          } else {
            out << "(";
            for (const auto& [a, b] : sv.transitions) out << "(" << a << " " << b << ")";
            out << ")";
          }
          out << ")\n\n";
        } else {
          out << "  :init " << sv.init << "\n  :min " << sv.min << "\n  :max " << sv.max << ")\n\n";
        }
        break;
      }
      case DefKind::Event: {
        const auto& ev = prog.events[idx];
        out << "(defevent " << ev.name << "\n  :effects " << assigns_src(ev.effects) << ")\n\n";
        break;
      }
      case DefKind::Basic: {
        const auto& sk = prog.basics[idx];
        out << "(defskill " << sk.name << "\n";
        common_src(out, sk.inputs, sk.precondition, sk.start, sk.time_interval);
        if (!sk.invariants.empty()) {
          out << "  :invariant (";
          for (std::size_t i = 0; i < sk.invariants.size(); ++i) {
            const auto& inv = sk.invariants[i];
            out << (i ? " " : "") << inv.tag << " (:guard " << cond_src(inv.guard)
                << " :effects " << assigns_src(inv.effects) << ")";
          }
          out << ")\n";
        }
        out << "  :action (" << sk.action << ")\n";
        if (sk.interrupt) out << "  :interrupt (:effects " << assigns_src(sk.interrupt->effects) << ")\n";
        outcomes_src(out, ":success", sk.successes);
        outcomes_src(out, ":failure", sk.failures);
        out << ")\n\n";
        break;
      }
      case DefKind::Composite: {
        const auto& sk = prog.composites[idx];
        out << "(defskill " << sk.name << "\n";
        if (sk.monitor) out << "  :monitor t\n";
        common_src(out, sk.inputs, sk.precondition, sk.start, sk.time_interval);
        if (sk.interrupt) out << "  :interrupt (:effects " << assigns_src(sk.interrupt->effects) << ")\n";
        outcomes_src(out, ":success", sk.successes);
        outcomes_src(out, ":failure", sk.failures);
        out << "  :body (\n";
        body_src(out, sk.body, 4);
        out << "  ))\n\n";
        break;
      }
    }
  }
  return out.str();
}

namespace {
// Layout does not take part in the identity of a program.
void strip_locations(json& j) {
  if (j.is_object()) {
    j.erase("loc");
    for (auto& [k, v] : j.items()) strip_locations(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_locations(v);
  }
}
}  // namespace

std::string program_hash(const SkillProgram& prog) {
  json j = to_json(prog);
  strip_locations(j);
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace proskill::ast
