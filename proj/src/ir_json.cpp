#include "proskill/ir_json.hpp"

#include <cstdio>
#include <stdexcept>

namespace proskill::ir {

using nlohmann::json;

namespace {

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::Enum: return "enum";
    case VarKind::Nat: return "nat";
    case VarKind::Bool: return "bool";
  }
  return "enum";
}

VarKind kind_from(const std::string& s) {
  if (s == "enum") return VarKind::Enum;
  if (s == "nat") return VarKind::Nat;
  if (s == "bool") return VarKind::Bool;
  throw std::invalid_argument("unknown variable kind " + s);
}

const char* call_name(HostCall::Kind k) {
  switch (k) {
    case HostCall::Kind::Start: return "start";
    case HostCall::Kind::Interrupt: return "interrupt";
    case HostCall::Kind::Cancel: return "cancel";
  }
  return "start";
}

HostCall::Kind call_from(const std::string& s) {
  if (s == "start") return HostCall::Kind::Start;
  if (s == "interrupt") return HostCall::Kind::Interrupt;
  if (s == "cancel") return HostCall::Kind::Cancel;
  throw std::invalid_argument("unknown host call " + s);
}

json value_json(const VarDecl& v, Value x) {
  if (v.kind == VarKind::Nat) return x;
  return v.format(x);
}

Value value_from(const VarDecl& v, const json& j) {
  if (j.is_number_integer()) {
    Value x = j.get<Value>();
    if (x < v.min || x > v.max) throw std::invalid_argument("value out of range for " + v.name);
    return x;
  }
  if (j.is_boolean()) return j.get<bool>() ? 1 : 0;
  auto x = v.parse(j.get<std::string>());
  if (!x) throw std::invalid_argument("bad value " + j.dump() + " for " + v.name);
  return *x;
}

int lookup(int idx, const std::string& what, const std::string& name) {
  if (idx < 0) throw std::invalid_argument("unknown " + what + " " + name);
  return idx;
}

}  // namespace

json expr_to_json(const ProcessNetwork& net, const Expr& e) {
  switch (e.op) {
    case Expr::Op::True: return true;
    case Expr::Op::False: return false;
    case Expr::Op::Eq:
    case Expr::Op::Lt:
    case Expr::Op::Le: {
      const auto& v = net.vars.at(e.a);
      const char* op = e.op == Expr::Op::Eq ? "eq" : e.op == Expr::Op::Lt ? "lt" : "le";
      return {{"op", op}, {"var", v.name}, {"value", value_json(v, e.b)}};
    }
    case Expr::Op::EqVar:
      return {{"op", "eqvar"}, {"var", net.vars.at(e.a).name}, {"other", net.vars.at(e.b).name}};
    case Expr::Op::At: {
      const auto& p = net.processes.at(e.a);
      return {{"op", "at"}, {"proc", p.name}, {"state", p.states.at(e.b).name}};
    }
    case Expr::Op::And:
    case Expr::Op::Or:
    case Expr::Op::Not: {
      json args = json::array();
      for (const auto& x : e.args) args.push_back(expr_to_json(net, x));
      const char* op = e.op == Expr::Op::And ? "and" : e.op == Expr::Op::Or ? "or" : "not";
      return {{"op", op}, {"args", args}};
    }
  }
  return true;
}

Expr expr_from_json(const ProcessNetwork& net, const json& j) {
  if (j.is_boolean()) return j.get<bool>() ? Expr::t() : Expr::f();
  const std::string op = j.at("op").get<std::string>();
  Expr e;
  if (op == "eq" || op == "lt" || op == "le") {
    e.op = op == "eq" ? Expr::Op::Eq : op == "lt" ? Expr::Op::Lt : Expr::Op::Le;
    const std::string name = j.at("var").get<std::string>();
    e.a = lookup(net.var_index(name), "variable", name);
    e.b = value_from(net.vars[e.a], j.at("value"));
  } else if (op == "eqvar") {
    e.op = Expr::Op::EqVar;
    e.a = lookup(net.var_index(j.at("var")), "variable", j.at("var"));
    e.b = lookup(net.var_index(j.at("other")), "variable", j.at("other"));
  } else if (op == "at") {
    e.op = Expr::Op::At;
    const std::string p = j.at("proc").get<std::string>();
    e.a = lookup(net.process_index(p), "process", p);
    const std::string s = j.at("state").get<std::string>();
    e.b = lookup(net.processes[e.a].state_index(s), "state", p + "@" + s);
  } else if (op == "and" || op == "or" || op == "not") {
    e.op = op == "and" ? Expr::Op::And : op == "or" ? Expr::Op::Or : Expr::Op::Not;
    for (const auto& a : j.at("args")) e.args.push_back(expr_from_json(net, a));
    if (e.op == Expr::Op::Not && e.args.size() != 1)
      throw std::invalid_argument("not takes one argument");
  } else {
    throw std::invalid_argument("unknown expression op " + op);
  }
  return e;
}

json to_json(const ProcessNetwork& net) {
  json vars = json::array();
  for (const auto& v : net.vars) {
    json jv = {{"name", v.name}, {"kind", kind_name(v.kind)}, {"init", value_json(v, v.init)}};
    if (v.kind == VarKind::Enum) jv["labels"] = v.labels;
    if (v.kind == VarKind::Nat) {
      jv["min"] = v.min;
      jv["max"] = v.max;
    }
    if (v.external) jv["external"] = true;
    if (!v.sv.empty()) jv["sv"] = v.sv;
    vars.push_back(jv);
  }
  json ports = json::array();
  for (const auto& p : net.ports) {
    json jp = {{"name", p.name}};
    if (!p.label.empty()) jp["label"] = p.label;
    ports.push_back(jp);
  }
  json procs = json::array();
  for (const auto& p : net.processes) {
    json states = json::array();
    for (const auto& s : p.states) {
      json js = {{"name", s.name}};
      if (s.marker != Marker::None) js["marker"] = to_string(s.marker);
      if (!s.note.empty()) js["note"] = s.note;
      states.push_back(js);
    }
    json trs = json::array();
    for (const auto& t : p.transitions) {
      json jt = {{"name", t.name},
                 {"from", p.states[t.from].name},
                 {"to", p.states[t.to].name},
                 {"window", json::array({t.lo, t.hi == kInf ? json("inf") : json(t.hi)})}};
      if (!t.guard.is_true()) jt["guard"] = expr_to_json(net, t.guard);
      if (t.port >= 0) jt["port"] = net.ports[t.port].name;
      if (!t.actions.empty()) {
        json acts = json::array();
        for (const auto& a : t.actions) {
          const auto& v = net.vars[a.var];
          if (a.src >= 0)
            acts.push_back({{"var", v.name}, {"src", net.vars[a.src].name}, {"add", a.value}});
          else
            acts.push_back({{"var", v.name}, {"value", value_json(v, a.value)}});
        }
        jt["actions"] = acts;
      }
      if (!t.calls.empty()) {
        json calls = json::array();
        for (const auto& c : t.calls)
          calls.push_back({{"kind", call_name(c.kind)}, {"record", net.records[c.record].name}});
        jt["calls"] = calls;
      }
      if (!t.log.empty()) jt["log"] = t.log;
      if (t.marker != Marker::None) jt["marker"] = to_string(t.marker);
      if (!t.label.empty()) jt["label"] = t.label;
      trs.push_back(jt);
    }
    json jp = {{"name", p.name},
               {"category", p.category},
               {"initial", p.states[p.initial].name},
               {"states", states},
               {"transitions", trs}};
    if (!p.skill.empty()) jp["skill"] = p.skill;
    procs.push_back(jp);
  }
  json recs = json::array();
  auto vname = [&](int i) { return i >= 0 ? json(net.vars[i].name) : json(nullptr); };
  for (const auto& r : net.records) {
    json jr = {{"name", r.name},
               {"kind", r.kind},
               {"caller", vname(r.caller)},
               {"status", vname(r.status)},
               {"inv_active", vname(r.inv_active)},
               {"arg_index", vname(r.arg_index)},
               {"val", vname(r.val)},
               {"process", r.process >= 0 ? json(net.processes[r.process].name) : json(nullptr)},
               {"interruptible", r.interruptible}};
    if (r.task >= 0) jr["task"] = net.vars[r.task].name;
    recs.push_back(jr);
  }
  json args = json::array();
  for (const auto& row : net.arg_table) {
    json jr = json::array();
    for (const auto& a : row) jr.push_back({{"name", a.name}, {"text", a.text}, {"value", a.value}});
    args.push_back(jr);
  }
  return {{"format", "proskill-tts/1"},
          {"name", net.name},
          {"mode", net.mode},
          {"tick_rate", net.tick_rate},
          {"vars", vars},
          {"ports", ports},
          {"processes", procs},
          {"records", recs},
          {"arg_table", args}};
}

ProcessNetwork network_from_json(const json& j) {
  try {
    ProcessNetwork net;
    net.name = j.value("name", "");
    net.mode = j.value("mode", "");
    net.tick_rate = j.value("tick_rate", 100);
    for (const auto& jv : j.at("vars")) {
      VarDecl v;
      v.name = jv.at("name");
      v.kind = kind_from(jv.at("kind"));
      if (v.kind == VarKind::Enum) {
        v.labels = jv.at("labels").get<std::vector<std::string>>();
        v.min = 0;
        v.max = static_cast<Value>(v.labels.size()) - 1;
      } else if (v.kind == VarKind::Bool) {
        v.min = 0;
        v.max = 1;
      } else {
        v.min = jv.at("min");
        v.max = jv.at("max");
      }
      v.init = value_from(v, jv.at("init"));
      v.external = jv.value("external", false);
      v.sv = jv.value("sv", "");
      net.vars.push_back(std::move(v));
    }
    if (j.contains("ports"))
      for (const auto& jp : j.at("ports")) net.ports.push_back({jp.at("name"), jp.value("label", "")});
    // Processes first without transitions so At() expressions can resolve.
    const json& jprocs = j.at("processes");
    for (const auto& jp : jprocs) {
      ProcessDef p;
      p.name = jp.at("name");
      p.category = jp.value("category", "");
      p.skill = jp.value("skill", "");
      for (const auto& js : jp.at("states")) {
        State s{js.at("name"), Marker::None, js.value("note", "")};
        if (js.contains("marker")) {
          auto m = marker_from_string(js.at("marker"));
          if (!m) throw std::invalid_argument("unknown marker");
          s.marker = *m;
        }
        p.states.push_back(std::move(s));
      }
      p.initial = lookup(p.state_index(jp.at("initial")), "state", jp.at("initial"));
      net.processes.push_back(std::move(p));
    }
    if (j.contains("records")) {
      auto vidx = [&](const json& x) {
        return x.is_null() ? -1 : lookup(net.var_index(x), "variable", x);
      };
      for (const auto& jr : j.at("records")) {
        SkillRecordDecl r;
        r.name = jr.at("name");
        r.kind = jr.value("kind", "");
        r.caller = vidx(jr.at("caller"));
        r.status = vidx(jr.at("status"));
        r.inv_active = vidx(jr.at("inv_active"));
        r.arg_index = vidx(jr.at("arg_index"));
        r.val = vidx(jr.at("val"));
        r.process = jr.at("process").is_null()
                        ? -1
                        : lookup(net.process_index(jr.at("process")), "process", jr.at("process"));
        r.task = jr.contains("task") ? vidx(jr.at("task")) : -1;
        r.interruptible = jr.value("interruptible", false);
        net.records.push_back(std::move(r));
      }
    }
    if (j.contains("arg_table")) {
      net.arg_table.clear();
      for (const auto& row : j.at("arg_table")) {
        std::vector<CallArgument> r;
        for (const auto& a : row) r.push_back({a.at("name"), a.at("text"), a.at("value")});
        net.arg_table.push_back(std::move(r));
      }
      if (net.arg_table.empty()) net.arg_table.emplace_back();
    }
    for (std::size_t pi = 0; pi < jprocs.size(); ++pi) {
      ProcessDef& p = net.processes[pi];
      for (const auto& jt : jprocs[pi].at("transitions")) {
        Transition t;
        t.name = jt.value("name", "");
        t.from = lookup(p.state_index(jt.at("from")), "state", jt.at("from"));
        t.to = lookup(p.state_index(jt.at("to")), "state", jt.at("to"));
        if (jt.contains("window")) {
          t.lo = jt.at("window").at(0);
          const json& hi = jt.at("window").at(1);
          t.hi = hi.is_string() ? kInf : hi.get<Value>();
        }
        if (jt.contains("guard")) t.guard = expr_from_json(net, jt.at("guard"));
        if (jt.contains("port")) t.port = lookup(net.port_index(jt.at("port")), "port", jt.at("port"));
        if (jt.contains("actions")) {
          for (const auto& ja : jt.at("actions")) {
            Action a;
            a.var = lookup(net.var_index(ja.at("var")), "variable", ja.at("var"));
            if (ja.contains("src")) {
              a.src = lookup(net.var_index(ja.at("src")), "variable", ja.at("src"));
              a.value = ja.at("add");
            } else {
              a.value = value_from(net.vars[a.var], ja.at("value"));
            }
            t.actions.push_back(a);
          }
        }
        if (jt.contains("calls"))
          for (const auto& jc : jt.at("calls"))
            t.calls.push_back({call_from(jc.at("kind")),
                               lookup(net.record_index(jc.at("record")), "record", jc.at("record"))});
        t.log = jt.value("log", "");
        if (jt.contains("marker")) {
          auto m = marker_from_string(jt.at("marker"));
          if (!m) throw std::invalid_argument("unknown marker");
          t.marker = *m;
        }
        t.label = jt.value("label", "");
        p.transitions.push_back(std::move(t));
      }
    }
    net.check_well_formed();
    return net;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed network document: ") + e.what());
  }
}

std::string dump_network(const ProcessNetwork& net) { return to_json(net).dump(1) + "\n"; }

std::string network_hash(const ProcessNetwork& net) {
  const std::string s = to_json(net).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace proskill::ir
