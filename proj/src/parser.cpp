#include "proskill/parser.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "proskill/sexpr.hpp"

namespace proskill::ast {
namespace {

struct Field {
  std::string key;
  SourceLoc loc;
  std::vector<const SExpr*> values;
};

class Parser {
 public:
  Diagnostics diags;

  void error(SourceLoc loc, std::string msg) {
    diags.push_back({Severity::Error, loc, std::move(msg)});
  }
  void warning(SourceLoc loc, std::string msg) {
    diags.push_back({Severity::Warning, loc, std::move(msg)});
  }

  void parse_top(const SExpr& form, SkillProgram& prog) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_symbol()) {
      error(form.loc, "expected a (defsv ...), (defevent ...) or (defskill ...) form");
      return;
    }
    const std::string& head = form.items[0].text;
    if (head != "defsv" && head != "defevent" && head != "defskill") {
      error(form.loc, "unknown top-level form '" + head + "'");
      return;
    }
    if (form.items.size() < 2 || !form.items[1].is_symbol() || form.items[1].is_keyword()) {
      error(form.loc, head + " needs a name");
      return;
    }
    auto fields = collect_fields(form, 2);
    const std::string& name = form.items[1].text;
    if (head == "defsv") {
      prog.order.emplace_back(DefKind::StateVar, prog.state_vars.size());
      prog.state_vars.push_back(parse_sv(name, form.loc, fields));
    } else if (head == "defevent") {
      prog.order.emplace_back(DefKind::Event, prog.events.size());
      prog.events.push_back(parse_event(name, form.loc, fields));
    } else {
      parse_skill(name, form.loc, fields, prog);
    }
  }

 private:
  std::vector<Field> collect_fields(const SExpr& list, std::size_t start) {
    std::vector<Field> out;
    std::set<std::string> seen;
    for (std::size_t i = start; i < list.items.size(); ++i) {
      const SExpr& it = list.items[i];
      if (!it.is_keyword()) {
        error(it.loc, "expected a field keyword, got '" + to_string(it) + "'");
        continue;
      }
      Field f{it.text, it.loc, {}};
      if (!seen.insert(f.key).second) error(it.loc, "duplicate field " + f.key);
      if (f.key == ":transitions" && i + 1 < list.items.size() &&
          list.items[i + 1].is_symbol(":all")) {
        f.values.push_back(&list.items[++i]);
      }
      while (i + 1 < list.items.size() && !list.items[i + 1].is_keyword())
        f.values.push_back(&list.items[++i]);
      out.push_back(std::move(f));
    }
    return out;
  }

  const SExpr* single(const Field& f) {
    if (f.values.size() != 1) {
      error(f.loc, f.key + " expects exactly one value");
      return nullptr;
    }
    return f.values[0];
  }

  static std::string value_text(const SExpr& e) { return e.text; }

  bool is_value_atom(const SExpr& e) { return e.is_symbol() || e.is_number(); }

  // ---- state variables and events ----

  StateVarDef parse_sv(const std::string& name, SourceLoc loc, const std::vector<Field>& fields) {
    StateVarDef sv;
    sv.name = name;
    sv.loc = loc;
    bool has_states = false, has_min = false, has_max = false, has_init = false,
         has_transitions = false;
    for (const auto& f : fields) {
      const SExpr* v = single(f);
      if (!v) continue;
      if (f.key == ":states") {
        has_states = true;
        if (!v->is_list() || v->items.empty()) {
          error(v->loc, ":states expects a non-empty list of values");
          continue;
        }
        for (const auto& s : v->items) {
          if (!s.is_symbol() || s.is_keyword())
            error(s.loc, "state value must be an identifier");
          else
            sv.values.push_back(s.text);
        }
      } else if (f.key == ":init") {
        has_init = true;
        if (!is_value_atom(*v))
          error(v->loc, ":init expects a value");
        else
          sv.init = value_text(*v);
      } else if (f.key == ":min" || f.key == ":max") {
        if (!v->is_number() || v->number != static_cast<int>(v->number)) {
          error(v->loc, f.key + " expects an integer");
          continue;
        }
        (f.key == ":min" ? sv.min : sv.max) = static_cast<int>(v->number);
        (f.key == ":min" ? has_min : has_max) = true;
      } else if (f.key == ":transitions") {
        has_transitions = true;
        if (v->is_symbol(":all")) {
          sv.all_transitions = true;
        } else if (v->is_list()) {
          for (const auto& p : v->items) {
            if (!p.is_list() || p.items.size() != 2 || !p.items[0].is_symbol() ||
                !p.items[1].is_symbol()) {
              error(p.loc, "transition must be a (from to) pair");
              continue;
            }
            sv.transitions.emplace_back(p.items[0].text, p.items[1].text);
          }
        } else {
          error(v->loc, ":transitions expects :all or a list of pairs");
        }
      } else {
        error(f.loc, "unknown field " + f.key + " in defsv");
      }
    }
    if (has_states && (has_min || has_max))
      error(loc, "state variable " + name + " mixes :states with :min/:max");
    if (!has_states && !(has_min && has_max))
      error(loc, "state variable " + name + " needs :states or both :min and :max");
    sv.enumerated = has_states;
    if (!has_init) error(loc, "state variable " + name + " has no :init");
    if (!has_states && has_transitions)
      error(loc, ":transitions only applies to enumerated state variables");
    if (has_states && !has_transitions) {
      warning(loc, "state variable " + name + " has no :transitions; assuming :all");
      sv.all_transitions = true;
    }
    return sv;
  }

  EventDef parse_event(const std::string& name, SourceLoc loc, const std::vector<Field>& fields) {
    EventDef ev;
    ev.name = name;
    ev.loc = loc;
    for (const auto& f : fields) {
      if (f.key == ":effects") {
        if (const SExpr* v = single(f)) ev.effects = parse_assigns(*v);
      } else {
        error(f.loc, "unknown field " + f.key + " in defevent");
      }
    }
    return ev;
  }

  // ---- conditions and effects ----

  std::optional<Condition> parse_condition(const SExpr& e) {
    if (e.is_list() && e.items.size() == 2 &&
        (e.items[0].is_symbol("~") || e.items[0].is_symbol("not")) && e.items[1].is_list()) {
      auto inner = parse_condition(e.items[1]);
      if (!inner) return std::nullopt;
      if (inner->negated) {
        error(e.loc, "double negation is not supported in conditions");
        return std::nullopt;
      }
      inner->negated = true;
      inner->loc = e.loc;
      return inner;
    }
    if (e.is_list() && e.items.size() == 2 && e.items[0].is_symbol() &&
        !e.items[0].is_keyword() && is_value_atom(e.items[1])) {
      return Condition{e.items[0].text, value_text(e.items[1]), false, e.loc};
    }
    error(e.loc, "expected a condition (sv value) or (~ (sv value)), got " + to_string(e));
    return std::nullopt;
  }

  std::vector<Condition> parse_conditions(const SExpr& e) {
    std::vector<Condition> out;
    if (!e.is_list()) {
      error(e.loc, "expected a condition list");
      return out;
    }
    if (e.items.empty()) return out;
    if (e.items[0].is_atom()) {
      if (auto c = parse_condition(e)) out.push_back(*c);
      return out;
    }
    for (const auto& it : e.items)
      if (auto c = parse_condition(it)) out.push_back(*c);
    return out;
  }

  std::optional<Assign> parse_assign(const SExpr& e) {
    if (e.is_list() && e.items.size() == 2 && e.items[0].is_symbol() &&
        !e.items[0].is_keyword() && is_value_atom(e.items[1]))
      return Assign{e.items[0].text, value_text(e.items[1]), e.loc};
    error(e.loc, "expected an assignment (sv value), got " + to_string(e));
    return std::nullopt;
  }

  std::vector<Assign> parse_assigns(const SExpr& e) {
    std::vector<Assign> out;
    if (!e.is_list()) {
      error(e.loc, "expected an effect list");
      return out;
    }
    if (e.items.empty()) return out;
    if (e.items[0].is_atom()) {
      if (auto a = parse_assign(e)) out.push_back(*a);
      return out;
    }
    for (const auto& it : e.items)
      if (auto a = parse_assign(it)) out.push_back(*a);
    return out;
  }

  std::vector<TaggedCondition> parse_tagged_conditions(const SExpr& e) {
    std::vector<TaggedCondition> out;
    if (!e.is_list()) {
      error(e.loc, "expected a (tag condition ...) list");
      return out;
    }
    for (std::size_t i = 0; i < e.items.size(); i += 2) {
      const SExpr& tag = e.items[i];
      if (!tag.is_symbol() || tag.is_keyword()) {
        error(tag.loc, "expected a tag, got " + to_string(tag));
        continue;
      }
      if (i + 1 >= e.items.size()) {
        error(tag.loc, "tag " + tag.text + " has no condition");
        break;
      }
      if (auto c = parse_condition(e.items[i + 1])) out.push_back({tag.text, *c});
    }
    return out;
  }

  std::vector<Invariant> parse_invariants(const SExpr& e) {
    std::vector<Invariant> out;
    if (!e.is_list()) {
      error(e.loc, "expected a (tag (:guard ...) ...) list");
      return out;
    }
    for (std::size_t i = 0; i < e.items.size(); i += 2) {
      const SExpr& tag = e.items[i];
      if (!tag.is_symbol() || tag.is_keyword()) {
        error(tag.loc, "expected an invariant tag, got " + to_string(tag));
        continue;
      }
      if (i + 1 >= e.items.size() || !e.items[i + 1].is_list()) {
        error(tag.loc, "invariant " + tag.text + " needs a (:guard ...) form");
        break;
      }
      Invariant inv;
      inv.tag = tag.text;
      inv.loc = tag.loc;
      bool has_guard = false;
      for (const auto& f : collect_fields(e.items[i + 1], 0)) {
        const SExpr* v = single(f);
        if (!v) continue;
        if (f.key == ":guard") {
          if (auto c = parse_condition(*v)) {
            inv.guard = *c;
            has_guard = true;
          }
        } else if (f.key == ":effects") {
          inv.effects = parse_assigns(*v);
        } else {
          error(f.loc, "unknown field " + f.key + " in invariant");
        }
      }
      if (!has_guard) error(tag.loc, "invariant " + tag.text + " has no :guard");
      out.push_back(std::move(inv));
    }
    return out;
  }

  std::vector<Outcome> parse_outcomes(const Field& f) {
    std::vector<Outcome> out;
    std::vector<const SExpr*> items;
    if (f.values.size() == 1 && f.values[0]->is_list()) {
      for (const auto& it : f.values[0]->items) items.push_back(&it);
    } else {
      items = f.values;
    }
    if (items.empty()) error(f.loc, f.key + " expects at least one tag");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const SExpr& tag = *items[i];
      if (!tag.is_symbol() || tag.is_keyword()) {
        error(tag.loc, "expected an outcome tag, got " + to_string(tag));
        continue;
      }
      Outcome o;
      o.tag = tag.text;
      o.loc = tag.loc;
      if (i + 1 < items.size() && items[i + 1]->is_list()) {
        for (const auto& g : collect_fields(*items[++i], 0)) {
          const SExpr* v = single(g);
          if (!v) continue;
          if (g.key == ":effects")
            o.effects = parse_assigns(*v);
          else if (g.key == ":postcondition")
            o.postcondition = parse_conditions(*v);
          else
            error(g.loc, "unknown field " + g.key + " in outcome");
        }
      }
      out.push_back(std::move(o));
    }
    return out;
  }

  std::optional<TimeInterval> parse_interval(const SExpr& e) {
    if (e.kind != SExpr::Kind::Interval || e.items.size() != 2 || !e.items[0].is_number() ||
        !e.items[1].is_number()) {
      error(e.loc, "malformed time interval " + to_string(e) + ", expected [min, max]");
      return std::nullopt;
    }
    TimeInterval ti{e.items[0].number, e.items[1].number, e.loc};
    if (ti.min < 0 || ti.max < 0) {
      error(e.loc, "time interval bounds must be non-negative");
      return std::nullopt;
    }
    return ti;
  }

  std::vector<Param> parse_inputs(const SExpr& e) {
    std::vector<Param> out;
    if (!e.is_list() || e.items.size() % 2 != 0) {
      error(e.loc, ":input expects ($name type ...) pairs");
      return out;
    }
    for (std::size_t i = 0; i < e.items.size(); i += 2) {
      const SExpr& n = e.items[i];
      const SExpr& t = e.items[i + 1];
      if (!n.is_symbol() || n.text.size() < 2 || n.text[0] != '$') {
        error(n.loc, "parameter names start with '$'");
        continue;
      }
      if (!t.is_symbol("float") && !t.is_symbol("int")) {
        error(t.loc, "parameter type must be float or int");
        continue;
      }
      out.push_back({n.text.substr(1), t.text});
    }
    return out;
  }

  std::optional<InterruptClause> parse_interrupt(const SExpr& e) {
    if (!e.is_list()) {
      error(e.loc, ":interrupt expects (:effects ...)");
      return std::nullopt;
    }
    InterruptClause ic;
    ic.loc = e.loc;
    for (const auto& f : collect_fields(e, 0)) {
      const SExpr* v = single(f);
      if (!v) continue;
      if (f.key == ":effects")
        ic.effects = parse_assigns(*v);
      else
        error(f.loc, "unknown field " + f.key + " in :interrupt");
    }
    return ic;
  }

  // ---- tests and instructions ----

  std::optional<Test> parse_test(const SExpr& e) {
    Test t;
    t.loc = e.loc;
    if (e.is_symbol("t") || e.is_symbol("true")) {
      t.kind = Test::Kind::True;
      return t;
    }
    if (e.is_symbol("nil") || e.is_symbol("false")) {
      t.kind = Test::Kind::False;
      return t;
    }
    if (!e.is_list() || e.items.empty()) {
      error(e.loc, "expected a test, got " + to_string(e));
      return std::nullopt;
    }
    const SExpr& head = e.items[0];
    if ((head.is_symbol("~") || head.is_symbol("not")) && e.items.size() == 2) {
      auto inner = parse_test(e.items[1]);
      if (!inner) return std::nullopt;
      t.kind = Test::Kind::Not;
      t.args.push_back(std::move(*inner));
      return t;
    }
    if (head.is_symbol("and") || head.is_symbol("or")) {
      t.kind = head.is_symbol("and") ? Test::Kind::And : Test::Kind::Or;
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        auto a = parse_test(e.items[i]);
        if (!a) return std::nullopt;
        t.args.push_back(std::move(*a));
      }
      if (t.args.empty()) {
        error(e.loc, head.text + " needs at least one operand");
        return std::nullopt;
      }
      return t;
    }
    if (head.is_symbol("=") && e.items.size() == 3 && e.items[1].is_symbol() &&
        is_value_atom(e.items[2])) {
      const std::string& lhs = e.items[1].text;
      const auto dot = lhs.find('.');
      t.value = value_text(e.items[2]);
      if (dot == std::string::npos) {
        t.kind = Test::Kind::SvEq;
        t.name = lhs;
      } else {
        t.kind = Test::Kind::SkillField;
        t.name = lhs.substr(0, dot);
        t.field = lhs.substr(dot + 1);
        if (t.field != "status" && t.field != "res") {
          error(e.items[1].loc, "unknown skill field '" + t.field + "', expected status or res");
          return std::nullopt;
        }
      }
      return t;
    }
    if (e.items.size() == 2 && head.is_symbol() && !head.is_keyword() &&
        is_value_atom(e.items[1])) {
      t.kind = Test::Kind::SvEq;
      t.name = head.text;
      t.value = value_text(e.items[1]);
      return t;
    }
    error(e.loc, "expected a test, got " + to_string(e));
    return std::nullopt;
  }

  std::vector<Instruction> parse_body_list(const std::vector<SExpr>& items, std::size_t from,
                                           std::size_t to) {
    std::vector<Instruction> out;
    for (std::size_t i = from; i < to; ++i)
      if (auto ins = parse_instruction(items[i])) out.push_back(std::move(*ins));
    return out;
  }

  std::optional<Instruction> parse_instruction(const SExpr& e) {
    if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol()) {
      error(e.loc, "expected an instruction, got " + to_string(e));
      return std::nullopt;
    }
    Instruction ins;
    ins.loc = e.loc;
    const std::string& head = e.items[0].text;
    const std::size_t n = e.items.size();
    using K = Instruction::Kind;

    if (head == "^") {
      if (n != 2) {
        error(e.loc, "(^ ...) takes one condition or a duration");
        return std::nullopt;
      }
      if (e.items[1].is_number()) {
        ins.kind = K::WaitTime;
        ins.seconds = e.items[1].number;
        if (ins.seconds < 0) {
          error(e.loc, "wait duration must be non-negative");
          return std::nullopt;
        }
        return ins;
      }
      auto t = parse_test(e.items[1]);
      if (!t) return std::nullopt;
      ins.kind = K::WaitCond;
      ins.test = std::move(*t);
      return ins;
    }
    if (head == "if" || head == "while") {
      if (n < 2) {
        error(e.loc, "(" + head + " ...) needs a test");
        return std::nullopt;
      }
      auto t = parse_test(e.items[1]);
      if (!t) return std::nullopt;
      ins.kind = head == "if" ? K::If : K::While;
      ins.test = std::move(*t);
      std::size_t else_at = n;
      for (std::size_t i = 2; i < n; ++i)
        if (e.items[i].is_symbol(":else")) {
          else_at = i;
          break;
        }
      if (else_at != n && head == "while") {
        error(e.items[else_at].loc, ":else is only allowed in if");
        return std::nullopt;
      }
      ins.body = parse_body_list(e.items, 2, else_at);
      if (else_at != n) ins.else_body = parse_body_list(e.items, else_at + 1, n);
      return ins;
    }
    if (head == "do") {
      std::size_t until_at = n;
      for (std::size_t i = 1; i < n; ++i)
        if (e.items[i].is_symbol(":until")) {
          until_at = i;
          break;
        }
      if (until_at + 2 != n) {
        error(e.loc, "(do ...) must end with :until test");
        return std::nullopt;
      }
      auto t = parse_test(e.items[until_at + 1]);
      if (!t) return std::nullopt;
      ins.kind = K::DoUntil;
      ins.test = std::move(*t);
      ins.body = parse_body_list(e.items, 1, until_at);
      return ins;
    }
    if (head == "//") {
      ins.kind = K::Parallel;
      for (std::size_t i = 1; i < n; ++i) {
        const SExpr& br = e.items[i];
        if (!br.is_list()) {
          error(br.loc, "parallel branch must be a list of instructions");
          continue;
        }
        ins.branches.push_back(parse_body_list(br.items, 0, br.items.size()));
      }
      return ins;
    }
    if (head == "printf") {
      if (n != 2 || !e.items[1].is_string()) {
        error(e.loc, "(printf \"text\") takes one string");
        return std::nullopt;
      }
      ins.kind = K::Printf;
      ins.name = e.items[1].text;
      return ins;
    }
    if (head == "success" || head == "failure" || head == "goto" || head == "label") {
      if (n != 2 || !e.items[1].is_symbol() || e.items[1].is_keyword()) {
        error(e.loc, "(" + head + " name) takes one identifier");
        return std::nullopt;
      }
      ins.kind = head == "success"   ? K::Success
                 : head == "failure" ? K::Failure
                 : head == "goto"    ? K::Goto
                                     : K::Label;
      ins.name = e.items[1].text;
      return ins;
    }
    static constexpr std::string_view kInterrupt = ".interrupt";
    if (head.size() > kInterrupt.size() &&
        head.compare(head.size() - kInterrupt.size(), kInterrupt.size(), kInterrupt) == 0) {
      if (n != 1) {
        error(e.loc, "(" + head + ") takes no arguments");
        return std::nullopt;
      }
      ins.kind = K::Interrupt;
      ins.name = head.substr(0, head.size() - kInterrupt.size());
      return ins;
    }
    if (head.find('.') != std::string::npos || head[0] == ':') {
      error(e.loc, "unknown instruction '" + head + "'");
      return std::nullopt;
    }
    ins.kind = K::Call;
    ins.name = head;
    if ((n - 1) % 2 != 0) {
      error(e.loc, "call arguments must be name/value pairs");
      return std::nullopt;
    }
    for (std::size_t i = 1; i < n; i += 2) {
      const SExpr& an = e.items[i];
      const SExpr& av = e.items[i + 1];
      if (!an.is_symbol() || an.is_keyword() || !av.is_number()) {
        error(an.loc, "call argument must be 'name number'");
        return std::nullopt;
      }
      ins.args.push_back({an.text, av.text, av.number});
    }
    return ins;
  }

  // ---- skills ----

  void parse_skill(const std::string& name, SourceLoc loc, const std::vector<Field>& fields,
                   SkillProgram& prog) {
    bool has_body = false, has_action = false;
    for (const auto& f : fields) {
      has_body = has_body || f.key == ":body";
      has_action = has_action || f.key == ":action";
    }
    if (has_body && has_action) {
      error(loc, "skill " + name + " has both :action and :body");
      return;
    }
    if (!has_body && !has_action) {
      error(loc, "skill " + name + " needs an :action or a :body");
      return;
    }
    if (has_action) {
      BasicSkillDef sk;
      sk.name = name;
      sk.loc = loc;
      for (const auto& f : fields) {
        if (f.key == ":success" || f.key == ":failure") {
          auto& dst = f.key == ":success" ? sk.successes : sk.failures;
          dst = parse_outcomes(f);
          continue;
        }
        const SExpr* v = single(f);
        if (!v) continue;
        if (f.key == ":input") sk.inputs = parse_inputs(*v);
        else if (f.key == ":precondition") sk.precondition = parse_tagged_conditions(*v);
        else if (f.key == ":start") sk.start = parse_assigns(*v);
        else if (f.key == ":invariant") sk.invariants = parse_invariants(*v);
        else if (f.key == ":time_interval") sk.time_interval = parse_interval(*v);
        else if (f.key == ":interrupt") sk.interrupt = parse_interrupt(*v);
        else if (f.key == ":action") {
          if (v->is_symbol() && !v->is_keyword()) sk.action = v->text;
          else if (v->is_list() && v->items.size() == 1 && v->items[0].is_symbol())
            sk.action = v->items[0].text;
          else error(v->loc, ":action expects (command)");
        } else {
          error(f.loc, "unknown field " + f.key + " in basic skill");
        }
      }
      prog.order.emplace_back(DefKind::Basic, prog.basics.size());
      prog.basics.push_back(std::move(sk));
      return;
    }
    CompositeSkillDef sk;
    sk.name = name;
    sk.loc = loc;
    for (const auto& f : fields) {
      if (f.key == ":success" || f.key == ":failure") {
        auto& dst = f.key == ":success" ? sk.successes : sk.failures;
        dst = parse_outcomes(f);
        continue;
      }
      const SExpr* v = single(f);
      if (!v) continue;
      if (f.key == ":input") sk.inputs = parse_inputs(*v);
      else if (f.key == ":precondition") sk.precondition = parse_tagged_conditions(*v);
      else if (f.key == ":start") sk.start = parse_assigns(*v);
      else if (f.key == ":time_interval") sk.time_interval = parse_interval(*v);
      else if (f.key == ":interrupt") sk.interrupt = parse_interrupt(*v);
      else if (f.key == ":monitor") {
        if (v->is_symbol("t")) sk.monitor = true;
        else if (v->is_symbol("nil")) sk.monitor = false;
        else error(v->loc, ":monitor expects t or nil");
      } else if (f.key == ":body") {
        if (!v->is_list()) {
          error(v->loc, ":body expects a list of instructions");
        } else if (v->items.empty()) {
          error(v->loc, "empty body in skill " + name);
        } else {
          sk.body = parse_body_list(v->items, 0, v->items.size());
        }
      } else {
        error(f.loc, "unknown field " + f.key + " in composite skill");
      }
    }
    prog.order.emplace_back(DefKind::Composite, prog.composites.size());
    prog.composites.push_back(std::move(sk));
  }
};

}  // namespace

ParseResult parse_program(std::string_view source) {
  ParseResult res;
  auto read = read_sexprs(source);
  res.diagnostics = std::move(read.diagnostics);
  if (has_errors(res.diagnostics)) return res;
  Parser p;
  SkillProgram prog;
  for (const auto& form : read.forms) p.parse_top(form, prog);
  res.diagnostics.insert(res.diagnostics.end(), p.diags.begin(), p.diags.end());
  if (!has_errors(res.diagnostics)) res.program = std::move(prog);
  return res;
}

SkillProgram load_program(std::string_view source, const std::optional<std::string>& entry) {
  auto parsed = parse_program(source);
  if (!parsed.ok()) throw DiagnosticError(parsed.diagnostics);
  auto validated = validate_program(std::move(*parsed.program), entry);
  if (!validated.ok()) throw DiagnosticError(validated.diagnostics);
  return std::move(*validated.program);
}

SkillProgram load_program_file(const std::string& path, const std::optional<std::string>& entry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_program(ss.str(), entry);
}

}  // namespace proskill::ast
