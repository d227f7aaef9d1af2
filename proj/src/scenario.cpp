#include "proskill/scenario.hpp"

#include <fstream>
#include <stdexcept>

#include "proskill/translator.hpp"

namespace proskill::sim {

namespace {
[[noreturn]] void fail(const std::string& m) { throw std::invalid_argument("scenario: " + m); }

CommandBehavior parse_behavior(const std::string& skill, const nlohmann::json& j) {
  if (!j.is_object()) fail("behaviour of " + skill + " must be an object");
  CommandBehavior b;
  const auto& d = j.contains("duration_ticks") ? j["duration_ticks"] : nlohmann::json(0);
  if (d.is_number_integer()) {
    b.min_ticks = b.max_ticks = d.get<std::int64_t>();
  } else if (d.is_array() && d.size() == 2 && d[0].is_number_integer() && d[1].is_number_integer()) {
    b.min_ticks = d[0].get<std::int64_t>();
    b.max_ticks = d[1].get<std::int64_t>();
  } else {
    fail("duration_ticks of " + skill + " must be an integer or [lo, hi]");
  }
  if (b.min_ticks < 0 || b.min_ticks > b.max_ticks) fail("bad duration for " + skill);
  if (!j.contains("outcome")) fail("missing outcome for " + skill);
  const auto& o = j["outcome"];
  if (o.is_string()) {
    b.outcomes.push_back(o.get<std::string>());
  } else if (o.is_array() && !o.empty()) {
    for (const auto& x : o) {
      if (!x.is_string()) fail("outcome of " + skill + " must be a string");
      b.outcomes.push_back(x.get<std::string>());
    }
  } else {
    fail("outcome of " + skill + " must be a string or a non-empty list");
  }
  if (j.contains("result")) b.result = j["result"];
  return b;
}
}  // namespace

Scenario parse_scenario(const nlohmann::json& j) {
  if (!j.is_object()) fail("top level must be an object");
  Scenario s;
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("description")) s.description = j["description"].get<std::string>();
  if (j.contains("strict")) s.strict = j["strict"].get<bool>();
  if (j.contains("max_ticks")) s.max_ticks = j["max_ticks"].get<std::int64_t>();
  if (j.contains("commands")) {
    for (const auto& [skill, v] : j["commands"].items()) {
      std::vector<CommandBehavior> list;
      if (v.is_array()) {
        for (const auto& x : v) list.push_back(parse_behavior(skill, x));
      } else {
        list.push_back(parse_behavior(skill, v));
      }
      if (list.empty()) fail("empty behaviour list for " + skill);
      s.commands[skill] = std::move(list);
    }
  }
  if (j.contains("timeline")) {
    for (const auto& x : j["timeline"]) {
      TimelineEntry e;
      e.tick = x.at("tick").get<std::int64_t>();
      if (x.contains("event")) e.event = x["event"].get<std::string>();
      if (x.contains("interrupt")) e.interrupt = x["interrupt"].get<std::string>();
      if (e.event.empty() == e.interrupt.empty()) fail("timeline entry needs one of event, interrupt");
      if (!s.timeline.empty() && e.tick < s.timeline.back().tick) fail("timeline is not sorted by tick");
      if (e.tick < 0) fail("negative tick in timeline");
      s.timeline.push_back(std::move(e));
    }
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    fail(path + ": " + ex.what());
  }
  return parse_scenario(j);
}

std::vector<std::string> validate_scenario(const Scenario& s, const ast::SkillProgram& prog,
                                           int tick_rate) {
  std::vector<std::string> warnings;
  for (const auto& [skill, list] : s.commands) {
    const ast::BasicSkillDef* b = prog.find_basic(skill);
    if (!b) fail("unknown skill " + skill);
    const auto lo = translate::to_ticks(b->time_interval->min, tick_rate);
    const auto hi = translate::to_ticks(b->time_interval->max, tick_rate);
    for (const auto& beh : list) {
      for (const auto& tag : beh.outcomes) {
        bool declared = tag == "interrupted" && b->interrupt;
        for (const auto& o : b->successes) declared |= o.tag == tag;
        for (const auto& o : b->failures) declared |= o.tag == tag;
        if (!declared && s.strict) fail("outcome " + tag + " is not declared by " + skill);
      }
      if (beh.min_ticks < lo || beh.max_ticks > hi)
        warnings.push_back("duration of " + skill + " outside its time interval [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "] ticks");
    }
  }
  for (const auto& e : s.timeline) {
    if (!e.event.empty() && !prog.find_event(e.event)) fail("unknown event " + e.event);
    if (!e.interrupt.empty() && !prog.is_skill(e.interrupt)) fail("unknown skill " + e.interrupt);
  }
  return warnings;
}

}  // namespace proskill::sim
