#include "proskill/runtime.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

#include "proskill/ir_json.hpp"

namespace proskill::runtime {

using ir::Configuration;
using ir::Marker;

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["stop_reason"] = stop_reason;
  j["ticks"] = ticks;
  j["statuses"] = statuses;
  j["results"] = results;
  j["state_variables"] = state_variables;
  j["warnings"] = {{"undershoot", undershoot_warnings},
                   {"overshoot", overshoot_warnings},
                   {"postcondition", postcondition_warnings},
                   {"jitter", jitter_warnings}};
  j["blocked_waits"] = blocked_waits;
  if (fault) j["fault"] = {{"kind", fault_kind}, {"message", *fault}};
  return j;
}

Engine::Engine(translate::TranslationUnit unit, Backend* backend, EngineOptions opts,
               std::string program_hash)
    : unit_(std::move(unit)), sem_(unit_.network), backend_(backend), opts_(opts) {
  if (unit_.mode != translate::Mode::Run) throw std::invalid_argument("engine needs a RUN unit");
  const auto& net = unit_.network;
  event_var_ = net.var_index("proskill_event");
  interrupt_var_ = net.var_index("proskill_interrupt");
  if (!unit_.entry.empty()) {
    entry_caller_ = net.records[net.record_index(unit_.entry)].caller;
  }
  config_ = sem_.initial();
  entry_started_ = entry_caller_ >= 0 && config_.vals[entry_caller_] != ir::kCallerNone;
  nlohmann::json info{{"network", ir::network_hash(net)},
                      {"entry", unit_.entry},
                      {"tick_rate", net.tick_rate}};
  if (!program_hash.empty()) info["program"] = program_hash;
  trace_.push_back({0, "program", "", "", "", "", "", info.dump()});
}

void Engine::inject_event(const std::string& name) {
  if (event_var_ < 0 || !unit_.network.vars[event_var_].parse(name) || name == "none")
    throw std::invalid_argument("unknown event " + name);
  std::lock_guard lock(mu_);
  requests_.push_back({Request::Kind::Event, name});
}

void Engine::interrupt_skill(const std::string& skill) {
  const auto& net = unit_.network;
  if (interrupt_var_ < 0 || !net.vars[interrupt_var_].parse(skill) || skill == "none") {
    if (net.record_index(skill) >= 0) throw std::invalid_argument("skill " + skill + " is not interruptible");
    throw std::invalid_argument("unknown skill " + skill);
  }
  std::lock_guard lock(mu_);
  requests_.push_back({Request::Kind::Interrupt, skill});
}

void Engine::post_completion(TaskId id, const std::string& tag, nlohmann::json result) {
  std::lock_guard lock(mu_);
  completions_.push_back({id, tag, std::move(result)});
}

void Engine::emit(TraceEvent e) {
  e.tick = tick_;
  if (sink_) sink_->push_back(e);
  trace_.push_back(std::move(e));
}

bool Engine::drain_completions() {
  std::deque<Completion> cs;
  {
    std::lock_guard lock(mu_);
    cs.swap(completions_);
  }
  bool any = false;
  const auto& net = unit_.network;
  for (auto& c : cs) {
    auto it = task_record_.find(c.id);
    if (it == task_record_.end()) continue;
    const int r = it->second;
    task_record_.erase(it);
    auto a = active_.find(r);
    if (a == active_.end() || a->second != c.id) continue;
    active_.erase(a);
    const auto& rec = net.records[r];
    emit({0, "completion", rec.name, "", "", "", "", c.tag});
    const auto& slot = net.vars[rec.task];
    auto v = slot.parse(c.tag);
    if (!v || c.tag == "pending" || c.tag == "illegal") v = slot.parse("illegal");
    config_.vals[rec.task] = *v;
    last_tag_[r] = c.tag;
    results_[c.id] = std::move(c.result);
    any = true;
  }
  return any;
}

void Engine::fire(const ir::FireCandidate& cand) {
  const auto& net = unit_.network;
  const Configuration before = config_;
  sem_.fire_in_place(config_, cand);
  for (auto [p, t] : cand.parts) {
    const auto& tr = net.processes[p].transitions[t];
    emit({0, "fire", net.processes[p].name, tr.name, "", "", "", tr.label});
  }
  for (std::size_t v = 0; v < net.vars.size(); ++v)
    if (!net.vars[v].sv.empty() && before.vals[v] != config_.vals[v])
      emit({0, "var", "", "", net.vars[v].name, net.vars[v].format(before.vals[v]),
            net.vars[v].format(config_.vals[v]), ""});
  for (auto [p, t] : cand.parts) {
    const auto& tr = net.processes[p].transitions[t];
    if (tr.log.empty()) continue;
    const bool warning = tr.marker != Marker::None || tr.log.rfind("WARNING", 0) == 0;
    emit({0, warning ? "warning" : "print", net.processes[p].name, tr.name, "", "", "", tr.log});
    if (tr.marker == Marker::UndershootWarn) ++warnings_[0];
    if (tr.marker == Marker::OvershootWarn) ++warnings_[1];
    if (tr.marker == Marker::PostconditionWarn) ++warnings_[2];
  }
  for (auto [p, t] : cand.parts) {
    const auto& tr = net.processes[p].transitions[t];
    for (const auto& call : tr.calls) {
      const auto& rec = net.records[call.record];
      switch (call.kind) {
        case ir::HostCall::Kind::Start: {
          const TaskId id = next_task_++;
          active_[call.record] = id;
          task_record_[id] = call.record;
          const auto row = config_.vals[rec.arg_index];
          const auto& args = net.arg_table.at(row);
          nlohmann::json a = nlohmann::json::object();
          for (const auto& x : args) a[x.name] = x.value;
          emit({0, "start", rec.name, tr.name, "", "", "", a.dump()});
          backend_->start_task(*this, id, rec.name, args);
          break;
        }
        case ir::HostCall::Kind::Interrupt: {
          auto it = active_.find(call.record);
          if (it == active_.end()) break;
          const TaskId id = it->second;
          // Leaving the wait state through the interrupt port: the engine stops waiting.
          if (rec.process == p) active_.erase(it);
          emit({0, "interrupt_task", rec.name, tr.name, "", "", "", "interrupt"});
          backend_->interrupt_task(*this, id, rec.name);
          break;
        }
        case ir::HostCall::Kind::Cancel: {
          auto it = active_.find(call.record);
          if (it == active_.end()) break;
          const TaskId id = it->second;
          active_.erase(it);
          emit({0, "interrupt_task", rec.name, tr.name, "", "", "", "cancel"});
          backend_->cancel_task(*this, id, rec.name);
          break;
        }
      }
    }
  }
  for (auto [p, t] : cand.parts) {
    const auto& proc = net.processes[p];
    const auto& tr = proc.transitions[t];
    if (proc.states[tr.to].marker != Marker::ErrorState) continue;
    if (proc.category == "sv") {
      const int x = net.var_index(proc.name.substr(3));
      throw IllegalTransitionFault(proc.name.substr(3), proc.states[tr.from].name,
                                   x >= 0 ? net.vars[x].format(config_.vals[x]) : "?");
    }
    const int r = net.record_index(proc.skill);
    std::string tag = "?";
    if (auto it = last_tag_.find(r); it != last_tag_.end()) tag = it->second;
    throw IllegalReturnFault(proc.skill, tag);
  }
}

void Engine::quiesce(int& microsteps) {
  std::vector<ir::FireCandidate> cands;
  for (;;) {
    sem_.enabled_into(config_, cands);
    if (cands.empty()) {
      if (drain_completions()) continue;
      return;
    }
    if (++microsteps > opts_.microstep_limit)
      throw LivelockFault("more than " + std::to_string(opts_.microstep_limit) +
                          " firings in tick " + std::to_string(tick_));
    fire(cands.front());
  }
}

void Engine::raise_fault(const ir::ModelFault& f, const std::string& kind) {
  fault_ = f.what();
  fault_kind_ = kind;
  emit({0, "fault", "", "", "", "", "", kind + ": " + f.what()});
}

Trace Engine::run_tick() {
  Trace out;
  if (fault_) return out;
  sink_ = &out;
  try {
    if (backend_) backend_->on_tick(*this, tick_);
    std::deque<Request> reqs;
    {
      std::lock_guard lock(mu_);
      reqs.swap(requests_);
    }
    int micro = 0;
    drain_completions();
    quiesce(micro);
    const auto& net = unit_.network;
    for (const auto& r : reqs) {
      const int var = r.kind == Request::Kind::Event ? event_var_ : interrupt_var_;
      emit({0, r.kind == Request::Kind::Event ? "event" : "interrupt_request", "", "", "", "", "",
            r.name});
      config_.vals[var] = *net.vars[var].parse(r.name);
      quiesce(micro);
      config_.vals[var] = 0;
    }
    if (!sem_.can_advance(config_)) throw LivelockFault("time blocked in tick " + std::to_string(tick_));
    sem_.advance_in_place(config_);
  } catch (const LivelockFault& f) {
    raise_fault(f, "LivelockFault");
  } catch (const IllegalTransitionFault& f) {
    raise_fault(f, "IllegalTransitionFault");
  } catch (const IllegalReturnFault& f) {
    raise_fault(f, "IllegalReturnFault");
  } catch (const ir::RangeFault& f) {
    raise_fault(f, "RangeFault");
  }
  if (!fault_) ++tick_;
  sink_ = nullptr;
  return out;
}

bool Engine::mission_done() const {
  return entry_started_ && entry_caller_ >= 0 && config_.vals[entry_caller_] == ir::kCallerNone;
}

std::string Engine::status_of(const std::string& skill) const {
  const auto& net = unit_.network;
  const int r = net.record_index(skill);
  if (r < 0) throw std::invalid_argument("unknown skill " + skill);
  const int v = net.records[r].status;
  return net.vars[v].format(config_.vals[v]);
}

std::string Engine::value_of(const std::string& var) const {
  const auto& net = unit_.network;
  const int v = net.var_index(var);
  if (v < 0) throw std::invalid_argument("unknown variable " + var);
  return net.vars[v].format(config_.vals[v]);
}

Report Engine::run_mission(const RunOptions& opts) {
  using clock = std::chrono::steady_clock;
  Report rep;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(1.0 / unit_.network.tick_rate));
  auto next = clock::now();
  for (;;) {
    if (fault_) {
      rep.stop_reason = "fault";
      break;
    }
    if (mission_done()) {
      rep.stop_reason = "mission_done";
      break;
    }
    if (tick_ >= opts.max_ticks) {
      rep.stop_reason = "max_ticks";
      break;
    }
    if (opts.stop && opts.stop(*this)) {
      rep.stop_reason = "stop_condition";
      break;
    }
    run_tick();
    if (opts.clock == ClockMode::Wall) {
      next += period;
      const auto now = clock::now();
      if (now > next) {
        ++warnings_[3];
        emit({0, "warning", "", "", "", "", "", "tick overrun"});
        next = now;
      } else {
        std::this_thread::sleep_until(next);
      }
    }
  }
  const auto& net = unit_.network;
  rep.ticks = tick_;
  for (const auto& r : net.records) {
    if (r.kind == "branch") continue;
    rep.statuses[r.name] = net.vars[r.status].format(config_.vals[r.status]);
    rep.results[r.name] = net.vars[r.val].format(config_.vals[r.val]);
  }
  for (const auto& v : net.vars)
    if (!v.sv.empty()) rep.state_variables[v.name] = v.format(config_.vals[net.var_index(v.name)]);
  for (std::size_t p = 0; p < net.processes.size(); ++p) {
    const auto& st = net.processes[p].states[config_.loc[p]];
    if (st.note == "wait_cond") rep.blocked_waits.push_back(net.processes[p].name + "@" + st.name);
  }
  rep.undershoot_warnings = warnings_[0];
  rep.overshoot_warnings = warnings_[1];
  rep.postcondition_warnings = warnings_[2];
  rep.jitter_warnings = warnings_[3];
  rep.fault = fault_;
  rep.fault_kind = fault_kind_;
  rep.trace = trace_;
  return rep;
}

}  // namespace proskill::runtime
