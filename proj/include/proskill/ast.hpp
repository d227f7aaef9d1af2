#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "proskill/diagnostic.hpp"

/// Abstract syntax of ProSkill acting programs.
///
/// Values are kept as their source spelling (`Good`, `3`); validation checks
/// them against the declared state variable domains.
namespace proskill::ast {

struct StateVarDef {
  std::string name;
  SourceLoc loc;
  bool enumerated = true;
  std::vector<std::string> values;  // enumerated kind
  int min = 0;                      // bounded-natural kind
  int max = 0;
  std::string init;
  bool all_transitions = false;
  std::vector<std::pair<std::string, std::string>> transitions;

  friend bool operator==(const StateVarDef&, const StateVarDef&);
};

/// `(sv value)` or `(~ (sv value))`.
struct Condition {
  std::string sv;
  std::string value;
  bool negated = false;
  SourceLoc loc;

  friend bool operator==(const Condition&, const Condition&);
};

struct Assign {
  std::string sv;
  std::string value;
  SourceLoc loc;

  friend bool operator==(const Assign&, const Assign&);
};

struct EventDef {
  std::string name;
  SourceLoc loc;
  std::vector<Assign> effects;

  friend bool operator==(const EventDef&, const EventDef&);
};

struct TaggedCondition {
  std::string tag;
  Condition cond;

  friend bool operator==(const TaggedCondition&, const TaggedCondition&) = default;
};

struct Invariant {
  std::string tag;
  Condition guard;
  std::vector<Assign> effects;
  SourceLoc loc;

  friend bool operator==(const Invariant&, const Invariant&);
};

struct Outcome {
  std::string tag;
  std::vector<Assign> effects;
  std::vector<Condition> postcondition;
  SourceLoc loc;

  friend bool operator==(const Outcome&, const Outcome&);
};

struct Param {
  std::string name;  // without the leading '$'
  std::string type;  // "float" or "int"

  friend bool operator==(const Param&, const Param&) = default;
};

struct TimeInterval {
  double min = 0;
  double max = 0;
  SourceLoc loc;

  friend bool operator==(const TimeInterval& a, const TimeInterval& b) {
    return a.min == b.min && a.max == b.max;
  }
};

struct InterruptClause {
  std::vector<Assign> effects;
  SourceLoc loc;

  friend bool operator==(const InterruptClause& a, const InterruptClause& b) {
    return a.effects == b.effects;
  }
};

/// Boolean tests in `if`, `while`, `do` and wait instructions.
struct Test {
  enum class Kind { SvEq, SkillField, And, Or, Not, True, False };

  Kind kind = Kind::True;
  std::string name;   // SV or skill
  std::string field;  // "status" or "res" for SkillField
  std::string value;  // value spelling (numbers keep their source text)
  std::vector<Test> args;
  SourceLoc loc;

  friend bool operator==(const Test&, const Test&);
};

struct CallArg {
  std::string name;
  std::string text;  // literal spelling
  double value = 0;

  friend bool operator==(const CallArg& a, const CallArg& b) {
    return a.name == b.name && a.text == b.text;
  }
};

struct Instruction {
  enum class Kind {
    Call,
    If,
    Parallel,
    WaitCond,
    WaitTime,
    Printf,
    Success,
    Failure,
    Interrupt,
    While,
    DoUntil,
    Goto,
    Label
  };

  Kind kind = Kind::Call;
  SourceLoc loc;
  std::string name;  // callee, tag, label, interrupt target or printf text
  std::vector<CallArg> args;
  Test test;
  double seconds = 0;
  std::vector<Instruction> body;       // If-then, While, DoUntil
  std::vector<Instruction> else_body;  // If-else
  std::vector<std::vector<Instruction>> branches;

  friend bool operator==(const Instruction&, const Instruction&);
};

struct BasicSkillDef {
  std::string name;
  SourceLoc loc;
  std::vector<Param> inputs;
  std::vector<TaggedCondition> precondition;
  std::vector<Assign> start;
  std::vector<Invariant> invariants;
  std::optional<TimeInterval> time_interval;
  std::string action;
  std::optional<InterruptClause> interrupt;
  std::vector<Outcome> successes;
  std::vector<Outcome> failures;

  friend bool operator==(const BasicSkillDef&, const BasicSkillDef&);
};

struct CompositeSkillDef {
  std::string name;
  SourceLoc loc;
  bool monitor = false;
  std::vector<Param> inputs;
  std::optional<TimeInterval> time_interval;
  std::vector<TaggedCondition> precondition;
  std::vector<Assign> start;
  std::optional<InterruptClause> interrupt;
  std::vector<Outcome> successes;
  std::vector<Outcome> failures;
  std::vector<Instruction> body;

  friend bool operator==(const CompositeSkillDef&, const CompositeSkillDef&);
};

enum class DefKind { StateVar, Event, Basic, Composite };

struct SkillProgram {
  std::vector<StateVarDef> state_vars;
  std::vector<EventDef> events;
  std::vector<BasicSkillDef> basics;
  std::vector<CompositeSkillDef> composites;
  /// Source order of definitions, as (kind, index into the matching vector).
  std::vector<std::pair<DefKind, std::size_t>> order;

  // Filled by validation.
  std::optional<std::string> entry;
  std::map<std::string, std::set<std::string>> call_graph;

  const StateVarDef* find_sv(const std::string& name) const;
  const EventDef* find_event(const std::string& name) const;
  const BasicSkillDef* find_basic(const std::string& name) const;
  const CompositeSkillDef* find_composite(const std::string& name) const;
  bool is_skill(const std::string& name) const {
    return find_basic(name) || find_composite(name);
  }

  /// Structural equality over definitions (locations and validation results ignored).
  friend bool operator==(const SkillProgram&, const SkillProgram&);
};

std::string to_string(Instruction::Kind k);

}  // namespace proskill::ast
