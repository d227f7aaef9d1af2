#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proskill/ast.hpp"

namespace proskill::sim {

/// Behaviour of one command call: a fixed or uniformly drawn duration and a
/// fixed or uniformly drawn outcome tag.
struct CommandBehavior {
  std::int64_t min_ticks = 0;
  std::int64_t max_ticks = 0;
  std::vector<std::string> outcomes;
  nlohmann::json result;
};

struct TimelineEntry {
  std::int64_t tick = 0;
  std::string event;      // set for events
  std::string interrupt;  // set for interrupt requests
};

struct Scenario {
  std::uint64_t seed = 0;
  std::string description;
  /// Calls of a skill consume its list in order; the last entry repeats.
  std::map<std::string, std::vector<CommandBehavior>> commands;
  std::vector<TimelineEntry> timeline;
  std::optional<std::int64_t> max_ticks;
  bool strict = true;  // outcome tags must be declared by the skill
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

/// Checks names and tags against the program; throws std::invalid_argument.
/// Returns warnings for durations outside the declared time interval.
std::vector<std::string> validate_scenario(const Scenario& s, const ast::SkillProgram& prog,
                                           int tick_rate);

}  // namespace proskill::sim
