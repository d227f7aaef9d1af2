#include "proskill/replay.hpp"

#include <map>
#include <set>

#include "proskill/semantics.hpp"

namespace proskill::replay {

using ir::Configuration;

nlohmann::json ReplayResult::to_json() const {
  nlohmann::json j;
  j["verdict"] = verdict == Verdict::Contained ? "CONTAINED" : "DIVERGENT";
  if (verdict == Verdict::Divergent) {
    j["step"] = step;
    j["tick"] = tick;
    j["message"] = message;
  }
  j["max_frontier"] = max_frontier;
  return j;
}

namespace {

using Key = std::vector<ir::Value>;
using Frontier = std::map<Key, Configuration>;

Key key_of(const Configuration& c) {
  Key k;
  k.reserve(c.loc.size() * 2 + c.vals.size());
  k.insert(k.end(), c.loc.begin(), c.loc.end());
  k.insert(k.end(), c.clocks.begin(), c.clocks.end());
  k.insert(k.end(), c.vals.begin(), c.vals.end());
  return k;
}

std::string label_of(const ir::ProcessNetwork& net, const ir::FireCandidate& cand) {
  for (auto [p, t] : cand.parts) {
    const auto& l = net.processes[p].transitions[t].label;
    if (!l.empty()) return l;
  }
  return {};
}

Frontier closure(const ir::Semantics& sem, const Frontier& in) {
  Frontier out = in;
  std::vector<Configuration> work;
  for (const auto& [k, c] : in) work.push_back(c);
  while (!work.empty()) {
    Configuration c = std::move(work.back());
    work.pop_back();
    for (const auto& cand : sem.enabled(c)) {
      if (!label_of(sem.net(), cand).empty()) continue;
      Configuration n = sem.fire(c, cand);
      if (out.emplace(key_of(n), n).second) work.push_back(std::move(n));
    }
  }
  return out;
}

Frontier step(const ir::Semantics& sem, const Frontier& in, const std::string& label) {
  Frontier out;
  for (const auto& [k, c] : closure(sem, in))
    for (const auto& cand : sem.enabled(c))
      if (label_of(sem.net(), cand) == label) {
        Configuration n = sem.fire(c, cand);
        out.emplace(key_of(n), std::move(n));
      }
  return out;
}

}  // namespace

ReplayResult replay(const ir::ProcessNetwork& net, const Trace& trace,
                    const std::string& program_hash) {
  ReplayResult res;
  if (!program_hash.empty()) {
    for (const auto& e : trace) {
      if (e.kind != "program") continue;
      const auto info = nlohmann::json::parse(e.message, nullptr, false);
      if (info.is_discarded() || !info.contains("program") ||
          info["program"].get<std::string>() != program_hash)
        throw HashMismatch("trace was recorded from a different program");
      break;
    }
  }
  const ir::Semantics sem(net);
  std::map<std::string, int> sv_vars;
  for (std::size_t v = 0; v < net.vars.size(); ++v)
    if (!net.vars[v].sv.empty()) sv_vars[net.vars[v].name] = static_cast<int>(v);

  Frontier front;
  const Configuration init = sem.initial();
  front.emplace(key_of(init), init);
  std::vector<ir::Value> sv_now = init.vals;
  std::map<int, std::int64_t> last_var_event;  // var -> trace index, within the tick

  auto diverge = [&](std::int64_t step_index, std::int64_t tick, std::string message) {
    res.verdict = ReplayResult::Verdict::Divergent;
    res.step = step_index;
    res.tick = tick;
    res.message = std::move(message);
    return res;
  };

  std::int64_t last_tick = 0;
  for (const auto& e : trace) last_tick = std::max(last_tick, e.tick);
  std::size_t i = 0;
  for (std::int64_t tick = 0; tick <= last_tick; ++tick) {
    last_var_event.clear();
    for (; i < trace.size() && trace[i].tick == tick; ++i) {
      const auto& e = trace[i];
      if (e.tick < tick) return diverge(static_cast<std::int64_t>(i), e.tick, "trace ticks not monotone");
      if (e.kind == "var") {
        auto it = sv_vars.find(e.var);
        if (it == sv_vars.end())
          return diverge(static_cast<std::int64_t>(i), tick, "unknown state variable " + e.var);
        auto v = net.vars[it->second].parse(e.new_value);
        if (!v)
          return diverge(static_cast<std::int64_t>(i), tick, "bad value " + e.new_value + " for " + e.var);
        sv_now[it->second] = *v;
        last_var_event[it->second] = static_cast<std::int64_t>(i);
        continue;
      }
      if (e.kind != "fire" || e.message.empty()) continue;
      front = step(sem, front, e.message);
      res.max_frontier = std::max(res.max_frontier, front.size());
      if (front.empty())
        return diverge(static_cast<std::int64_t>(i), tick, "no CHECK step labelled " + e.message);
    }
    if (i < trace.size() && trace[i].tick < tick)
      return diverge(static_cast<std::int64_t>(i), trace[i].tick, "trace ticks not monotone");

    // Tick boundary: settle, compare state variables, let one tick pass.
    Frontier settled;
    std::map<int, int> mismatches;
    for (auto& [k, c] : closure(sem, front)) {
      bool same = true;
      for (const auto& [name, v] : sv_vars)
        if (c.vals[v] != sv_now[v]) {
          same = false;
          ++mismatches[v];
          break;
        }
      if (!same) continue;
      if (tick == last_tick) {
        settled.emplace(k, c);
        continue;
      }
      auto n = sem.advance_time(c);
      if (n) settled.emplace(key_of(*n), std::move(*n));
    }
    res.max_frontier = std::max(res.max_frontier, settled.size());
    if (settled.empty()) {
      std::int64_t at = i == 0 ? 0 : static_cast<std::int64_t>(i) - 1;
      std::string what = "no CHECK configuration matches the state variables at the end of the tick";
      if (!mismatches.empty()) {
        const int v = mismatches.begin()->first;
        what = "state variable " + net.vars[v].name + " = " + net.vars[v].format(sv_now[v]) +
               " unreachable";
        if (auto it = last_var_event.find(v); it != last_var_event.end()) at = it->second;
      }
      return diverge(at, tick, what);
    }
    front = std::move(settled);
  }
  return res;
}

}  // namespace proskill::replay
