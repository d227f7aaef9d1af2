#include <gtest/gtest.h>

#include <set>

#include "oracle/microgen.hpp"
#include "proskill/parser.hpp"
#include "proskill/semantics.hpp"
#include "proskill/translator.hpp"
#include "support/models.hpp"

using namespace proskill;

namespace {

const ast::SkillProgram& drone() {
  static const auto prog = ast::load_program_file(support::fixture("drone.psk"));
  return prog;
}

}  // namespace

TEST(Translator, DroneInventory) {
  const auto unit = translate::assemble(drone(), {});
  const std::map<std::string, int> want = {{"sv", 7},       {"event", 10},   {"basic", 7},
                                           {"composite", 1}, {"branch", 2},   {"watchdog", 1},
                                           {"monitor", 1},   {"environment", 1}};
  EXPECT_EQ(unit.inventory, want);
  EXPECT_EQ(unit.entry, "uav_mission");
}

TEST(Translator, ProcessOrderFollowsCategories) {
  const auto unit = translate::assemble(drone(), {});
  const std::vector<std::string> order = {"sv", "event", "basic"};
  std::size_t stage = 0;
  for (const auto& p : unit.network.processes) {
    while (stage < order.size() && p.category != order[stage]) ++stage;
    if (stage == order.size()) {
      EXPECT_TRUE(p.category == "composite" || p.category == "monitor" || p.category == "branch" ||
                  p.category == "watchdog" || p.category == "environment")
          << p.name;
    }
  }
  EXPECT_EQ(unit.network.processes.front().category, "sv");
  EXPECT_EQ(unit.network.processes.back().category, "environment");
}

TEST(Translator, RunNetworkBindsHostVariables) {
  const auto unit = translate::assemble(drone(), {translate::Mode::Run, 100, {}});
  // The RUN environment only dispatches host events; it offers nothing on its own.
  const auto& env = unit.network.processes[unit.network.process_index("environment")];
  for (const auto& t : env.transitions) EXPECT_FALSE(t.guard.is_true()) << t.name;
  std::set<std::string> tasks;
  for (const auto& b : unit.bindings) {
    if (b.kind == "TASK") tasks.insert(b.skill);
    EXPECT_GE(unit.network.var_index(b.var), 0) << b.var;
    EXPECT_TRUE(unit.network.vars[unit.network.var_index(b.var)].external) << b.var;
  }
  EXPECT_EQ(tasks.size(), drone().basics.size());
  EXPECT_EQ(translate::bindings_json(unit)["bindings"].size(), unit.bindings.size());
}

TEST(Translator, SecondsRoundToNearestTick) {
  EXPECT_EQ(translate::to_ticks(1.0, 100), 100);
  EXPECT_EQ(translate::to_ticks(0.004, 100), 0);
  EXPECT_EQ(translate::to_ticks(0.005, 100), 1);
  EXPECT_EQ(translate::to_ticks(2.5, 1), 3);
  EXPECT_EQ(translate::to_ticks(60, 1), 60);
}

TEST(Translator, WatchdogWindowsScaleWithTheTickRate) {
  for (int rate : {1, 10, 100}) {
    const auto net = translate::assemble(drone(), {translate::Mode::Check, rate, {}}).network;
    EXPECT_EQ(net.tick_rate, rate);
    const auto& wd = net.processes[net.process_index("skill_uav_mission_watchdog")];
    // [60, 120] s: the undershoot flag drops after 60 s, overshoot comes 60 s later.
    for (const auto& t : wd.transitions)
      if (t.name == "monitor_to_skill_not_undershoot" || t.name == "monitor_to_skill_overshoot") {
        EXPECT_EQ(t.lo, 60 * rate) << t.name;
        EXPECT_EQ(t.hi, 60 * rate) << t.name;
      }
  }
}

TEST(Translator, EveryStateVariableHasAnErrorState) {
  const auto net = translate::assemble(drone(), {}).network;
  int svs = 0;
  for (const auto& p : net.processes) {
    if (p.category != "sv") continue;
    ++svs;
    bool error = false;
    for (const auto& s : p.states) error |= s.marker == ir::Marker::ErrorState;
    EXPECT_TRUE(error) << p.name;
  }
  EXPECT_EQ(svs, 7);
}

TEST(Translator, ForbiddenEdgesLeadToTheErrorState) {
  const auto net = translate::assemble(drone(), {}).network;
  const auto& sv = net.processes[net.process_index("sv_battery")];
  std::set<std::string> forbidden;
  for (const auto& t : sv.transitions)
    if (sv.states[t.to].marker == ir::Marker::ErrorState) forbidden.insert(t.name);
  EXPECT_EQ(forbidden, (std::set<std::string>{"Good_to_Critical_forbidden", "Critical_to_Good_forbidden"}));
}

TEST(Translator, EnvironmentOffersOnlyTheChosenEvents) {
  const auto unit = translate::assemble(drone(), support::reduced_drone());
  const auto& env = unit.network.processes[unit.network.process_index("environment")];
  std::set<std::string> offered;
  for (const auto& t : env.transitions) offered.insert(t.name);
  const auto opts = support::reduced_drone();
  for (const auto& e : *opts.env.events) EXPECT_TRUE(offered.count(e)) << e;
  EXPECT_FALSE(offered.count("flight_status_to_in_air"));
}

TEST(Translator, CountingEnvironmentStopsAtTheLimit) {
  auto opts = support::reduced_drone_battery();
  const auto unit = translate::assemble(drone(), opts);
  const ir::Semantics sem(unit.network);
  const int env = unit.network.process_index("environment");
  // Prefer environment steps whenever one is enabled: each event still fires at most once.
  auto c = sem.initial();
  int fired = 0;
  for (int step = 0; step < 2000; ++step) {
    const auto en = sem.enabled(c);
    if (en.empty()) {
      if (!sem.can_advance(c)) break;
      c = *sem.advance_time(c);
      continue;
    }
    const ir::FireCandidate* pick = &en.front();
    for (const auto& cand : en)
      for (const auto [p, t] : cand.parts)
        if (p == env) pick = &cand;
    for (const auto [p, t] : pick->parts) fired += p == env;
    c = sem.fire(c, *pick);
  }
  EXPECT_EQ(fired, 2);
}

TEST(Translator, GeneratedProgramsProduceWellFormedNetworks) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto micro = oracle::generate(seed);
    const auto prog = ast::load_program(micro.source);
    for (auto mode : {translate::Mode::Check, translate::Mode::Run}) {
      const auto unit = translate::assemble(prog, {mode, 1, micro.env});
      EXPECT_NO_THROW(unit.network.check_well_formed()) << seed;
      EXPECT_EQ(unit.inventory.at("sv"), static_cast<int>(prog.state_vars.size()));
    }
  }
}

TEST(Translator, InventoryJsonListsEveryCategory) {
  const auto j = translate::inventory_json(translate::assemble(drone(), {}));
  for (const auto& c : translate::kInventoryCategories) EXPECT_TRUE(j.dump().find(c) != std::string::npos) << c;
}
