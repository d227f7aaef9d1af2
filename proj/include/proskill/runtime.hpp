#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proskill/semantics.hpp"
#include "proskill/trace.hpp"
#include "proskill/translator.hpp"

namespace proskill::runtime {

class LivelockFault : public ir::ModelFault {
 public:
  using ir::ModelFault::ModelFault;
};
class IllegalTransitionFault : public ir::ModelFault {
 public:
  IllegalTransitionFault(std::string sv, std::string from, std::string to)
      : ir::ModelFault("illegal transition of " + sv + " from " + from + " to " + to),
        sv(std::move(sv)), from(std::move(from)), to(std::move(to)) {}
  std::string sv, from, to;
};
class IllegalReturnFault : public ir::ModelFault {
 public:
  IllegalReturnFault(std::string skill, std::string tag)
      : ir::ModelFault("command of skill " + skill + " returned illegal value " + tag),
        skill(std::move(skill)), tag(std::move(tag)) {}
  std::string skill, tag;
};

using TaskId = std::uint64_t;

class Engine;

/// Command executors. Calls happen on the engine thread while it fires
/// transitions; results come back through Engine::post_completion, from any thread.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual void start_task(Engine& engine, TaskId id, const std::string& skill,
                          const std::vector<ir::CallArgument>& args) = 0;
  /// Must eventually post the `interrupted` tag for the task.
  virtual void interrupt_task(Engine& engine, TaskId id, const std::string& skill) = 0;
  /// The engine no longer waits for this task; its completion is ignored.
  virtual void cancel_task(Engine& engine, TaskId id, const std::string& skill) = 0;
  /// Called at the start of every tick, before queued input is drained.
  virtual void on_tick(Engine&, std::int64_t) {}
};

struct EngineOptions {
  int microstep_limit = 10000;
};

enum class ClockMode { Virtual, Wall };

struct RunOptions {
  ClockMode clock = ClockMode::Virtual;
  std::int64_t max_ticks = 100000;
  /// Extra stop condition checked after every tick.
  std::function<bool(const Engine&)> stop;
};

struct Report {
  std::string stop_reason;  // mission_done, max_ticks, stop_condition, fault
  std::int64_t ticks = 0;
  std::map<std::string, std::string> statuses;  // skill -> status
  std::map<std::string, std::string> results;   // skill -> last outcome tag
  std::map<std::string, std::string> state_variables;
  int undershoot_warnings = 0;
  int overshoot_warnings = 0;
  int postcondition_warnings = 0;
  int jitter_warnings = 0;
  std::vector<std::string> blocked_waits;  // process@state for pending wait conditions
  std::optional<std::string> fault;
  std::string fault_kind;
  Trace trace;

  nlohmann::json to_json() const;
};

/// Executes a RUN network tick by tick. The configuration is owned by the
/// engine thread; inject_event, interrupt_skill and post_completion only
/// enqueue and may be called concurrently.
class Engine {
 public:
  Engine(translate::TranslationUnit unit, Backend* backend, EngineOptions opts = {},
         std::string program_hash = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void inject_event(const std::string& name);
  void interrupt_skill(const std::string& skill);
  void post_completion(TaskId id, const std::string& tag, nlohmann::json result = {});

  /// One cycle: drain input, fire to quiescence, advance one tick.
  Trace run_tick();
  Report run_mission(const RunOptions& opts);

  std::int64_t tick() const { return tick_; }
  const ir::Configuration& config() const { return config_; }
  const ir::ProcessNetwork& net() const { return unit_.network; }
  const translate::TranslationUnit& unit() const { return unit_; }
  const Trace& trace() const { return trace_; }
  bool faulted() const { return fault_.has_value(); }
  /// Entry skill has been activated and has returned.
  bool mission_done() const;
  std::string status_of(const std::string& skill) const;
  std::string value_of(const std::string& var) const;
  const std::map<TaskId, nlohmann::json>& results() const { return results_; }

 private:
  struct Request {
    enum class Kind { Event, Interrupt } kind;
    std::string name;
  };
  struct Completion {
    TaskId id;
    std::string tag;
    nlohmann::json result;
  };

  translate::TranslationUnit unit_;
  ir::Semantics sem_;
  Backend* backend_;
  EngineOptions opts_;
  ir::Configuration config_;
  std::int64_t tick_ = 0;
  Trace trace_;
  Trace* sink_ = nullptr;
  std::optional<std::string> fault_;
  std::string fault_kind_;
  std::map<int, TaskId> active_;        // record -> running task
  std::map<TaskId, int> task_record_;   // task -> record
  std::map<TaskId, nlohmann::json> results_;
  std::map<int, std::string> last_tag_;  // record -> last raw returned tag
  TaskId next_task_ = 1;
  int event_var_ = -1, interrupt_var_ = -1;
  int entry_caller_ = -1;
  bool entry_started_ = false;
  int warnings_[4] = {0, 0, 0, 0};  // undershoot, overshoot, postcondition, jitter

  std::mutex mu_;
  std::deque<Request> requests_;
  std::deque<Completion> completions_;

  void emit(TraceEvent e);
  bool drain_completions();
  void quiesce(int& microsteps);
  void fire(const ir::FireCandidate& cand);
  void raise_fault(const ir::ModelFault& f, const std::string& kind);
};

}  // namespace proskill::runtime
