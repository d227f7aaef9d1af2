#include "proskill/ast.hpp"

#include <tuple>

namespace proskill::ast {

bool operator==(const StateVarDef& a, const StateVarDef& b) {
  return std::tie(a.name, a.enumerated, a.values, a.min, a.max, a.init, a.all_transitions,
                  a.transitions) == std::tie(b.name, b.enumerated, b.values, b.min, b.max,
                                             b.init, b.all_transitions, b.transitions);
}

bool operator==(const Condition& a, const Condition& b) {
  return std::tie(a.sv, a.value, a.negated) == std::tie(b.sv, b.value, b.negated);
}

bool operator==(const Assign& a, const Assign& b) {
  return std::tie(a.sv, a.value) == std::tie(b.sv, b.value);
}

bool operator==(const EventDef& a, const EventDef& b) {
  return std::tie(a.name, a.effects) == std::tie(b.name, b.effects);
}

bool operator==(const Invariant& a, const Invariant& b) {
  return std::tie(a.tag, a.guard, a.effects) == std::tie(b.tag, b.guard, b.effects);
}

bool operator==(const Outcome& a, const Outcome& b) {
  return std::tie(a.tag, a.effects, a.postcondition) ==
         std::tie(b.tag, b.effects, b.postcondition);
}

bool operator==(const Test& a, const Test& b) {
  return std::tie(a.kind, a.name, a.field, a.value, a.args) ==
         std::tie(b.kind, b.name, b.field, b.value, b.args);
}

bool operator==(const Instruction& a, const Instruction& b) {
  return std::tie(a.kind, a.name, a.args, a.test, a.seconds, a.body, a.else_body,
                  a.branches) == std::tie(b.kind, b.name, b.args, b.test, b.seconds, b.body,
                                          b.else_body, b.branches);
}

bool operator==(const BasicSkillDef& a, const BasicSkillDef& b) {
  return std::tie(a.name, a.inputs, a.precondition, a.start, a.invariants, a.time_interval,
                  a.action, a.interrupt, a.successes, a.failures) ==
         std::tie(b.name, b.inputs, b.precondition, b.start, b.invariants, b.time_interval,
                  b.action, b.interrupt, b.successes, b.failures);
}

bool operator==(const CompositeSkillDef& a, const CompositeSkillDef& b) {
  return std::tie(a.name, a.monitor, a.inputs, a.time_interval, a.precondition, a.start,
                  a.interrupt, a.successes, a.failures, a.body) ==
         std::tie(b.name, b.monitor, b.inputs, b.time_interval, b.precondition, b.start,
                  b.interrupt, b.successes, b.failures, b.body);
}

bool operator==(const SkillProgram& a, const SkillProgram& b) {
  return std::tie(a.state_vars, a.events, a.basics, a.composites, a.order) ==
         std::tie(b.state_vars, b.events, b.basics, b.composites, b.order);
}

namespace {
template <class T>
const T* find_named(const std::vector<T>& v, const std::string& name) {
  for (const auto& x : v)
    if (x.name == name) return &x;
  return nullptr;
}
}  // namespace

const StateVarDef* SkillProgram::find_sv(const std::string& name) const {
  return find_named(state_vars, name);
}
const EventDef* SkillProgram::find_event(const std::string& name) const {
  return find_named(events, name);
}
const BasicSkillDef* SkillProgram::find_basic(const std::string& name) const {
  return find_named(basics, name);
}
const CompositeSkillDef* SkillProgram::find_composite(const std::string& name) const {
  return find_named(composites, name);
}

std::string to_string(Instruction::Kind k) {
  switch (k) {
    case Instruction::Kind::Call: return "call";
    case Instruction::Kind::If: return "if";
    case Instruction::Kind::Parallel: return "parallel";
    case Instruction::Kind::WaitCond: return "wait_cond";
    case Instruction::Kind::WaitTime: return "wait_time";
    case Instruction::Kind::Printf: return "printf";
    case Instruction::Kind::Success: return "success";
    case Instruction::Kind::Failure: return "failure";
    case Instruction::Kind::Interrupt: return "interrupt";
    case Instruction::Kind::While: return "while";
    case Instruction::Kind::DoUntil: return "do_until";
    case Instruction::Kind::Goto: return "goto";
    case Instruction::Kind::Label: return "label";
  }
  return "?";
}

}  // namespace proskill::ast
