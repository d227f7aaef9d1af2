#include "proskill/sim_backend.hpp"

#include <algorithm>

#include "proskill/translator.hpp"

namespace proskill::sim {

SimBackend::SimBackend(Scenario scenario, const ast::SkillProgram& prog, int tick_rate)
    : scenario_(std::move(scenario)), rng_(scenario_.seed) {
  for (const auto& b : prog.basics) {
    CommandBehavior d;
    d.min_ticks = d.max_ticks = translate::to_ticks(b.time_interval->min, tick_rate);
    if (!b.successes.empty()) d.outcomes.push_back(b.successes.front().tag);
    else if (!b.failures.empty()) d.outcomes.push_back(b.failures.front().tag);
    defaults_[b.name] = d;
  }
}

void SimBackend::start_task(runtime::Engine& engine, runtime::TaskId id, const std::string& skill,
                            const std::vector<ir::CallArgument>&) {
  const CommandBehavior* beh = nullptr;
  if (auto it = scenario_.commands.find(skill); it != scenario_.commands.end()) {
    const std::size_t n = calls_[skill]++;
    beh = &it->second[std::min(n, it->second.size() - 1)];
  } else {
    beh = &defaults_.at(skill);
  }
  const auto span = static_cast<std::uint64_t>(beh->max_ticks - beh->min_ticks) + 1;
  const std::int64_t duration = beh->min_ticks + static_cast<std::int64_t>(draw(span));
  const std::string tag = beh->outcomes.at(draw(beh->outcomes.size()));
  draws_.push_back({skill, engine.tick(), duration, tag});
  Scheduled s{engine.tick() + duration, seq_++, id, skill, tag, beh->result};
  if (duration == 0) {
    engine.post_completion(id, tag, beh->result);
    return;
  }
  scheduled_[id] = std::move(s);
}

void SimBackend::interrupt_task(runtime::Engine& engine, runtime::TaskId id, const std::string&) {
  scheduled_.erase(id);
  engine.post_completion(id, "interrupted", {});
}

void SimBackend::cancel_task(runtime::Engine&, runtime::TaskId id, const std::string&) {
  scheduled_.erase(id);
}

std::vector<SimBackend::Scheduled> SimBackend::pending() const {
  std::vector<Scheduled> out;
  for (const auto& [id, s] : scheduled_) out.push_back(s);
  std::sort(out.begin(), out.end(), [](const Scheduled& a, const Scheduled& b) {
    return a.due != b.due ? a.due < b.due : a.seq < b.seq;
  });
  return out;
}

void SimBackend::on_tick(runtime::Engine& engine, std::int64_t tick) {
  const auto& tl = scenario_.timeline;
  for (; next_timeline_ < tl.size() && tl[next_timeline_].tick <= tick; ++next_timeline_) {
    const auto& e = tl[next_timeline_];
    if (!e.event.empty()) engine.inject_event(e.event);
    else engine.interrupt_skill(e.interrupt);
  }
  for (const auto& s : pending()) {
    if (s.due > tick) break;
    engine.post_completion(s.id, s.tag, s.result);
    scheduled_.erase(s.id);
  }
}

}  // namespace proskill::sim
