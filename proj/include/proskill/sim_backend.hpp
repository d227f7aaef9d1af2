#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "proskill/ast.hpp"
#include "proskill/runtime.hpp"
#include "proskill/scenario.hpp"

namespace proskill::sim {

/// Scripted command executor. Completions are scheduled on a virtual tick
/// clock; unscripted skills finish at t_min with their first success tag.
class SimBackend : public runtime::Backend {
 public:
  SimBackend(Scenario scenario, const ast::SkillProgram& prog, int tick_rate);

  void start_task(runtime::Engine& engine, runtime::TaskId id, const std::string& skill,
                  const std::vector<ir::CallArgument>& args) override;
  void interrupt_task(runtime::Engine& engine, runtime::TaskId id,
                      const std::string& skill) override;
  void cancel_task(runtime::Engine& engine, runtime::TaskId id, const std::string& skill) override;
  void on_tick(runtime::Engine& engine, std::int64_t tick) override;

  struct Scheduled {
    std::int64_t due;
    std::uint64_t seq;
    runtime::TaskId id;
    std::string skill;
    std::string tag;
    nlohmann::json result;
  };
  /// Pending completions, in delivery order.
  std::vector<Scheduled> pending() const;
  /// Every (skill, start tick, duration, tag) drawn so far.
  struct Draw {
    std::string skill;
    std::int64_t start;
    std::int64_t duration;
    std::string tag;
  };
  const std::vector<Draw>& draws() const { return draws_; }

 private:
  Scenario scenario_;
  std::map<std::string, CommandBehavior> defaults_;
  std::map<std::string, std::size_t> calls_;
  std::map<runtime::TaskId, Scheduled> scheduled_;
  std::vector<Draw> draws_;
  std::size_t next_timeline_ = 0;
  std::uint64_t seq_ = 0;
  std::mt19937_64 rng_;

  std::uint64_t draw(std::uint64_t n) { return n <= 1 ? 0 : rng_() % n; }
};

}  // namespace proskill::sim
