#include "proskill/ir.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <stdexcept>

namespace proskill::ir {

std::string VarDecl::format(Value v) const {
  switch (kind) {
    case VarKind::Enum:
      if (v >= 0 && v < static_cast<Value>(labels.size())) return labels[v];
      return "#" + std::to_string(v);
    case VarKind::Bool: return v ? "true" : "false";
    case VarKind::Nat: return std::to_string(v);
  }
  return std::to_string(v);
}

std::optional<Value> VarDecl::parse(const std::string& text) const {
  switch (kind) {
    case VarKind::Enum: {
      auto it = std::find(labels.begin(), labels.end(), text);
      if (it == labels.end()) return std::nullopt;
      return static_cast<Value>(it - labels.begin());
    }
    case VarKind::Bool:
      if (text == "true") return 1;
      if (text == "false") return 0;
      return std::nullopt;
    case VarKind::Nat: {
      Value v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size() || v < min || v > max)
        return std::nullopt;
      return v;
    }
  }
  return std::nullopt;
}

Expr Expr::negate(Expr e) {
  if (e.op == Op::True) return f();
  if (e.op == Op::False) return t();
  if (e.op == Op::Not) return std::move(e.args.front());
  return {Op::Not, 0, 0, {std::move(e)}};
}

namespace {
Expr fold(Expr::Op op, std::vector<Expr> es) {
  const Expr::Op unit = op == Expr::Op::And ? Expr::Op::True : Expr::Op::False;
  const Expr::Op zero = op == Expr::Op::And ? Expr::Op::False : Expr::Op::True;
  std::vector<Expr> kept;
  for (auto& e : es) {
    if (e.op == unit) continue;
    if (e.op == zero) return {zero, 0, 0, {}};
    if (e.op == op) {
      for (auto& x : e.args) kept.push_back(std::move(x));
    } else {
      kept.push_back(std::move(e));
    }
  }
  if (kept.empty()) return {unit, 0, 0, {}};
  if (kept.size() == 1) return std::move(kept.front());
  return {op, 0, 0, std::move(kept)};
}
}  // namespace

Expr Expr::conj(std::vector<Expr> es) { return fold(Op::And, std::move(es)); }
Expr Expr::disj(std::vector<Expr> es) { return fold(Op::Or, std::move(es)); }

std::string to_string(Marker m) {
  switch (m) {
    case Marker::None: return "";
    case Marker::ErrorState: return "ERROR_STATE";
    case Marker::UndershootWarn: return "UNDERSHOOT_WARN";
    case Marker::OvershootWarn: return "OVERSHOOT_WARN";
    case Marker::PostconditionWarn: return "POSTCONDITION_WARN";
  }
  return "";
}

std::optional<Marker> marker_from_string(const std::string& s) {
  for (Marker m : {Marker::None, Marker::ErrorState, Marker::UndershootWarn,
                   Marker::OvershootWarn, Marker::PostconditionWarn})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

int ProcessDef::state_index(const std::string& s) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].name == s) return static_cast<int>(i);
  return -1;
}

namespace {
template <class T>
int index_of(const std::vector<T>& v, const std::string& n) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].name == n) return static_cast<int>(i);
  return -1;
}
}  // namespace

int ProcessNetwork::var_index(const std::string& n) const { return index_of(vars, n); }
int ProcessNetwork::process_index(const std::string& n) const { return index_of(processes, n); }
int ProcessNetwork::port_index(const std::string& n) const { return index_of(ports, n); }
int ProcessNetwork::record_index(const std::string& n) const { return index_of(records, n); }

void ProcessNetwork::check_well_formed() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  const int nv = static_cast<int>(vars.size());
  for (const auto& v : vars) {
    if (v.min > v.max) fail("variable " + v.name + " has an empty domain");
    if (v.init < v.min || v.init > v.max) fail("variable " + v.name + " init out of range");
    if (v.kind == VarKind::Enum && v.size() != static_cast<Value>(v.labels.size()))
      fail("variable " + v.name + " label count mismatch");
  }
  std::function<void(const Expr&, const std::string&)> check_expr;
  check_expr = [&](const Expr& e, const std::string& where) {
    switch (e.op) {
      case Expr::Op::Eq:
      case Expr::Op::Lt:
      case Expr::Op::Le:
        if (e.a < 0 || e.a >= nv) fail(where + ": bad variable index");
        break;
      case Expr::Op::EqVar:
        if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv) fail(where + ": bad variable index");
        break;
      case Expr::Op::At:
        if (e.a < 0 || e.a >= static_cast<int>(processes.size()) || e.b < 0 ||
            e.b >= static_cast<int>(processes[e.a].states.size()))
          fail(where + ": bad location reference");
        break;
      default: break;
    }
    for (const auto& x : e.args) check_expr(x, where);
  };
  for (const auto& p : processes) {
    const int ns = static_cast<int>(p.states.size());
    if (ns == 0) fail("process " + p.name + " has no states");
    if (p.initial < 0 || p.initial >= ns) fail("process " + p.name + " initial state undeclared");
    for (const auto& t : p.transitions) {
      const std::string where = p.name + "." + t.name;
      if (t.from < 0 || t.from >= ns || t.to < 0 || t.to >= ns) fail(where + ": undeclared state");
      if (t.lo < 0 || t.lo > t.hi) fail(where + ": malformed window");
      if (t.port >= static_cast<int>(ports.size())) fail(where + ": undeclared port");
      for (const auto& a : t.actions)
        if (a.var < 0 || a.var >= nv || a.src >= nv) fail(where + ": bad action variable");
      for (const auto& c : t.calls)
        if (c.record < 0 || c.record >= static_cast<int>(records.size()))
          fail(where + ": bad record in host call");
      check_expr(t.guard, where);
    }
  }
}

}  // namespace proskill::ir
