#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "proskill/parser.hpp"

namespace proskill::ast {
namespace {

const std::set<std::string> kStatusValues = {"no_status", "success", "failure", "failed_inv",
                                             "interrupted"};

class Validator {
 public:
  explicit Validator(SkillProgram& p) : prog_(p) {}

  Diagnostics diags;

  void run(const std::optional<std::string>& entry) {
    check_names();
    for (const auto& sv : prog_.state_vars) check_sv(sv);
    for (const auto& ev : prog_.events) check_assigns(ev.effects, "event " + ev.name);
    for (const auto& sk : prog_.basics) check_basic(sk);
    for (const auto& sk : prog_.composites) check_composite(sk);
    if (has_errors(diags)) return;
    check_recursion();
    if (has_errors(diags)) return;
    choose_entry(entry);
  }

 private:
  SkillProgram& prog_;

  void error(SourceLoc loc, std::string msg) {
    diags.push_back({Severity::Error, loc, std::move(msg)});
  }
  void warning(SourceLoc loc, std::string msg) {
    diags.push_back({Severity::Warning, loc, std::move(msg)});
  }

  void check_names() {
    std::map<std::string, SourceLoc> seen;
    auto add = [&](const std::string& name, SourceLoc loc) {
      if (name == "ROOT" || name == "None" || name == "NONE") {
        error(loc, "'" + name + "' is a reserved name");
        return;
      }
      auto [it, fresh] = seen.emplace(name, loc);
      if (!fresh)
        error(loc, "duplicate name " + name + " (first defined at line " +
                       std::to_string(it->second.line) + ")");
    };
    for (const auto& [kind, idx] : prog_.order) {
      switch (kind) {
        case DefKind::StateVar: add(prog_.state_vars[idx].name, prog_.state_vars[idx].loc); break;
        case DefKind::Event: add(prog_.events[idx].name, prog_.events[idx].loc); break;
        case DefKind::Basic: add(prog_.basics[idx].name, prog_.basics[idx].loc); break;
        case DefKind::Composite:
          add(prog_.composites[idx].name, prog_.composites[idx].loc);
          break;
      }
    }
  }

  static std::optional<int> as_int(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
  }

  bool value_ok(const StateVarDef& sv, const std::string& value) {
    if (sv.enumerated)
      return std::find(sv.values.begin(), sv.values.end(), value) != sv.values.end();
    auto v = as_int(value);
    return v && *v >= sv.min && *v <= sv.max;
  }

  void check_value(const std::string& svname, const std::string& value, SourceLoc loc) {
    const StateVarDef* sv = prog_.find_sv(svname);
    if (!sv) {
      error(loc, "undeclared state variable " + svname);
      return;
    }
    if (!value_ok(*sv, value)) error(loc, value + " not a value of " + svname);
  }

  void check_sv(const StateVarDef& sv) {
    if (sv.enumerated) {
      std::set<std::string> vals;
      for (const auto& v : sv.values)
        if (!vals.insert(v).second) error(sv.loc, "duplicate value " + v + " in " + sv.name);
      for (const auto& [a, b] : sv.transitions) {
        if (!vals.count(a)) error(sv.loc, a + " not a value of " + sv.name);
        if (!vals.count(b)) error(sv.loc, b + " not a value of " + sv.name);
      }
    } else if (sv.min > sv.max) {
      error(sv.loc, "empty range for " + sv.name);
    } else if (sv.min < 0) {
      error(sv.loc, "natural state variable " + sv.name + " has a negative bound");
    }
    if (!sv.init.empty() && !value_ok(sv, sv.init))
      error(sv.loc, "initial value " + sv.init + " not a value of " + sv.name);
  }

  void check_assigns(const std::vector<Assign>& as, const std::string& where) {
    std::set<std::string> assigned;
    for (const auto& a : as) {
      check_value(a.sv, a.value, a.loc);
      if (!assigned.insert(a.sv).second)
        error(a.loc, a.sv + " assigned twice in " + where);
    }
  }

  void check_condition(const Condition& c) { check_value(c.sv, c.value, c.loc); }

  void check_outcomes(const std::string& skill, const std::vector<Outcome>& succ,
                      const std::vector<Outcome>& fail, std::set<std::string>& tags) {
    for (const auto* list : {&succ, &fail}) {
      for (const auto& o : *list) {
        if (o.tag == "interrupted" || o.tag == "none" || o.tag.rfind("failed_inv", 0) == 0)
          error(o.loc, "outcome tag " + o.tag + " is reserved");
        if (!tags.insert(o.tag).second) error(o.loc, "duplicate tag " + o.tag + " in " + skill);
        check_assigns(o.effects, "outcome " + o.tag);
        for (const auto& c : o.postcondition) check_condition(c);
      }
    }
  }

  void check_common(const std::string& name, const std::vector<TaggedCondition>& pre,
                    const std::vector<Assign>& start, const std::optional<TimeInterval>& ti,
                    const std::optional<InterruptClause>& intr) {
    std::set<std::string> tags;
    for (const auto& tc : pre) {
      if (!tags.insert(tc.tag).second)
        error(tc.cond.loc, "duplicate precondition tag " + tc.tag + " in " + name);
      check_condition(tc.cond);
    }
    check_assigns(start, "skill " + name + " :start");
    if (ti && ti->min > ti->max)
      error(ti->loc, "time interval of " + name + " has min > max");
    if (intr) check_assigns(intr->effects, "skill " + name + " :interrupt");
  }

  void check_basic(const BasicSkillDef& sk) {
    check_common(sk.name, sk.precondition, sk.start, sk.time_interval, sk.interrupt);
    if (!sk.time_interval) error(sk.loc, "basic skill " + sk.name + " has no :time_interval");
    if (sk.action.empty()) error(sk.loc, "basic skill " + sk.name + " has no :action");
    std::set<std::string> tags;
    for (const auto& inv : sk.invariants) {
      if (!tags.insert(inv.tag).second)
        error(inv.loc, "duplicate invariant tag " + inv.tag + " in " + sk.name);
      check_condition(inv.guard);
      check_assigns(inv.effects, "invariant " + inv.tag);
    }
    tags.clear();
    check_outcomes(sk.name, sk.successes, sk.failures, tags);
    if (sk.successes.empty() && sk.failures.empty())
      error(sk.loc, "basic skill " + sk.name + " needs at least one success or failure outcome");
  }

  void check_composite(const CompositeSkillDef& sk) {
    check_common(sk.name, sk.precondition, sk.start, sk.time_interval, sk.interrupt);
    std::set<std::string> tags;
    check_outcomes(sk.name, sk.successes, sk.failures, tags);
    if (sk.body.empty()) error(sk.loc, "empty body in skill " + sk.name);
    auto& callees = prog_.call_graph[sk.name];
    check_scope(sk, sk.body, callees);
  }

  // One goto/label scope: the main body, or one parallel branch.
  void check_scope(const CompositeSkillDef& sk, const std::vector<Instruction>& body,
                   std::set<std::string>& callees) {
    std::map<std::string, SourceLoc> labels;
    std::vector<const Instruction*> gotos;
    std::function<void(const std::vector<Instruction>&, bool)> walk =
        [&](const std::vector<Instruction>& seq, bool in_branch) {
          for (const auto& ins : seq) {
            check_instruction(sk, ins, in_branch, callees);
            if (ins.kind == Instruction::Kind::Label &&
                !labels.emplace(ins.name, ins.loc).second)
              error(ins.loc, "duplicate label " + ins.name);
            if (ins.kind == Instruction::Kind::Goto) gotos.push_back(&ins);
            walk(ins.body, in_branch);
            walk(ins.else_body, in_branch);
          }
        };
    walk(body, branch_depth_ > 0);
    for (const auto* g : gotos)
      if (!labels.count(g->name)) error(g->loc, "goto target " + g->name + " is not a label in the same body");
  }

  int branch_depth_ = 0;

  void check_test(const Test& t) {
    switch (t.kind) {
      case Test::Kind::SvEq: check_value(t.name, t.value, t.loc); break;
      case Test::Kind::SkillField: {
        if (!prog_.is_skill(t.name)) {
          error(t.loc, "undeclared skill " + t.name);
          break;
        }
        if (t.field == "status") {
          if (!kStatusValues.count(t.value))
            error(t.loc, t.value + " is not a skill status");
        } else {
          std::set<std::string> ok = {"none", "interrupted"};
          auto add = [&](const std::vector<Outcome>& os) {
            for (const auto& o : os) ok.insert(o.tag);
          };
          if (auto* b = prog_.find_basic(t.name)) {
            add(b->successes);
            add(b->failures);
            for (const auto& inv : b->invariants) ok.insert("failed_inv_" + inv.tag);
          } else if (auto* c = prog_.find_composite(t.name)) {
            add(c->successes);
            add(c->failures);
          }
          if (!ok.count(t.value)) error(t.loc, t.value + " is not a result of " + t.name);
        }
        break;
      }
      case Test::Kind::And:
      case Test::Kind::Or:
      case Test::Kind::Not:
        for (const auto& a : t.args) check_test(a);
        break;
      case Test::Kind::True:
      case Test::Kind::False: break;
    }
  }

  void check_instruction(const CompositeSkillDef& sk, const Instruction& ins, bool in_branch,
                         std::set<std::string>& callees) {
    using K = Instruction::Kind;
    switch (ins.kind) {
      case K::Call: {
        callees.insert(ins.name);
        const BasicSkillDef* b = prog_.find_basic(ins.name);
        const CompositeSkillDef* c = prog_.find_composite(ins.name);
        if (!b && !c) {
          error(ins.loc, "undeclared skill " + ins.name);
          break;
        }
        if (c && c->monitor) error(ins.loc, "monitor skill " + ins.name + " cannot be called");
        const auto& inputs = b ? b->inputs : c->inputs;
        std::set<std::string> seen;
        for (const auto& a : ins.args) {
          if (!seen.insert(a.name).second) error(ins.loc, "argument " + a.name + " given twice");
          bool known = std::any_of(inputs.begin(), inputs.end(),
                                   [&](const Param& p) { return p.name == a.name; });
          if (!known) error(ins.loc, ins.name + " has no input named " + a.name);
        }
        break;
      }
      case K::If:
      case K::While:
      case K::DoUntil:
      case K::WaitCond: check_test(ins.test); break;
      case K::Parallel:
        if (ins.branches.size() < 2) error(ins.loc, "parallel needs at least two branches");
        ++branch_depth_;
        for (const auto& br : ins.branches) {
          if (br.empty()) error(ins.loc, "empty parallel branch");
          check_scope(sk, br, callees);
        }
        --branch_depth_;
        break;
      case K::Success:
      case K::Failure: {
        if (in_branch) {
          error(ins.loc, "success/failure cannot appear inside a parallel branch");
          break;
        }
        const auto& list = ins.kind == K::Success ? sk.successes : sk.failures;
        bool found = std::any_of(list.begin(), list.end(),
                                 [&](const Outcome& o) { return o.tag == ins.name; });
        if (!found)
          error(ins.loc, std::string(ins.kind == K::Success ? "success" : "failure") + " tag " +
                             ins.name + " not declared by " + sk.name);
        break;
      }
      case K::Interrupt: {
        const BasicSkillDef* b = prog_.find_basic(ins.name);
        const CompositeSkillDef* c = prog_.find_composite(ins.name);
        if (!b && !c) error(ins.loc, "undeclared skill " + ins.name);
        else if (b && !b->interrupt) error(ins.loc, ins.name + " is not interruptible");
        else if (ins.name == sk.name) error(ins.loc, "a skill cannot interrupt itself");
        break;
      }
      case K::WaitTime:
      case K::Printf:
      case K::Goto:
      case K::Label: break;
    }
  }

  void check_recursion() {
    std::map<std::string, int> color;
    std::vector<std::string> stack;
    bool reported = false;
    std::function<void(const std::string&)> dfs = [&](const std::string& s) {
      color[s] = 1;
      stack.push_back(s);
      auto it = prog_.call_graph.find(s);
      if (it != prog_.call_graph.end()) {
        for (const auto& callee : it->second) {
          if (color[callee] == 1 && !reported) {
            std::string cycle;
            auto from = std::find(stack.begin(), stack.end(), callee);
            for (auto p = from; p != stack.end(); ++p) cycle += *p + " -> ";
            cycle += callee;
            const auto* c = prog_.find_composite(callee);
            error(c ? c->loc : SourceLoc{}, "recursive call " + cycle);
            reported = true;
          } else if (color[callee] == 0) {
            dfs(callee);
          }
        }
      }
      stack.pop_back();
      color[s] = 2;
    };
    for (const auto& c : prog_.composites)
      if (color[c.name] == 0) dfs(c.name);
  }

  void choose_entry(const std::optional<std::string>& forced) {
    std::set<std::string> called;
    for (const auto& [caller, callees] : prog_.call_graph) called.insert(callees.begin(), callees.end());
    if (forced) {
      const auto* c = prog_.find_composite(*forced);
      if (!c || c->monitor) {
        error({}, "entry " + *forced + " is not a non-monitor composite skill");
        return;
      }
      prog_.entry = *forced;
      return;
    }
    std::vector<std::string> candidates;
    bool any_plain = false;
    for (const auto& c : prog_.composites) {
      if (c.monitor) continue;
      any_plain = true;
      if (!called.count(c.name)) candidates.push_back(c.name);
    }
    if (candidates.size() == 1) {
      prog_.entry = candidates.front();
    } else if (candidates.size() > 1) {
      std::string names;
      for (const auto& n : candidates) names += (names.empty() ? "" : ", ") + n;
      error({}, "several entry candidates (" + names + "); choose one with --entry");
    } else if (any_plain) {
      error({}, "no entry candidate: every composite skill is called by another");
    }
  }
};

}  // namespace

ParseResult validate_program(SkillProgram program, const std::optional<std::string>& entry) {
  ParseResult res;
  program.call_graph.clear();
  program.entry.reset();
  Validator v(program);
  v.run(entry);
  res.diagnostics = std::move(v.diags);
  if (!has_errors(res.diagnostics)) res.program = std::move(program);
  return res;
}

}  // namespace proskill::ast
