#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proskill/ast.hpp"
#include "proskill/ir.hpp"

namespace proskill::translate {

enum class Mode { Check, Run };

std::string to_string(Mode m);

/// What an occurrence bound counts: each event separately, or all events
/// writing the same state variable together.
enum class CountScope { Event, StateVariable };

/// Restrictions of the synthesized CHECK environment. The defaults offer every
/// event and every basic-skill interrupt at any time.
struct EnvOptions {
  std::optional<std::vector<std::string>> events;  // subset of events offered
  int max_occurrences = 0;                         // per counter; 0 = unbounded
  CountScope count_scope = CountScope::Event;
  bool interrupts = true;
  bool legal_only = false;  // offer an event only when it moves an SV along a declared edge
  bool quiescent = false;   // offer inputs only when no zero-delay internal step is enabled
};

struct Options {
  Mode mode = Mode::Check;
  int tick_rate = 100;
  EnvOptions env;
};

struct Binding {
  std::string name;
  std::string kind;  // EVENT_PORT, INTERRUPT_PORT, TASK
  std::string var;   // host-written variable
  std::string skill; // TASK only
};

struct TranslationUnit {
  Mode mode = Mode::Check;
  ir::ProcessNetwork network;
  std::vector<Binding> bindings;  // RUN only
  std::map<std::string, int> inventory;
  std::string entry;
};

inline const std::vector<std::string> kInventoryCategories = {
    "sv", "event", "basic", "composite", "branch", "watchdog", "monitor", "environment"};

/// Lowers a validated program. Process order: state variables, events, basic
/// skills, composite skills (each followed by its branches and watchdog),
/// environment.
TranslationUnit assemble(const ast::SkillProgram& prog, const Options& opts);

nlohmann::json inventory_json(const TranslationUnit& unit);
nlohmann::json bindings_json(const TranslationUnit& unit);

/// Seconds to ticks, rounded to nearest.
ir::Value to_ticks(double seconds, int tick_rate);

}  // namespace proskill::translate
