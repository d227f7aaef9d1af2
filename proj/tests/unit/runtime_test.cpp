#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "proskill/ast_io.hpp"
#include "proskill/ir_json.hpp"
#include "proskill/parser.hpp"
#include "proskill/runtime.hpp"
#include "proskill/scenario.hpp"
#include "proskill/sim_backend.hpp"
#include "proskill/stdio_backend.hpp"
#include "proskill/translator.hpp"
#include "support/models.hpp"

using namespace proskill;

namespace {

const ast::SkillProgram& drone() {
  static const auto prog = ast::load_program_file(support::fixture("drone.psk"));
  return prog;
}

runtime::Report run(const sim::Scenario& sc, const ast::SkillProgram& prog = drone()) {
  sim::SimBackend backend(sc, prog, 100);
  runtime::Engine eng(translate::assemble(prog, {translate::Mode::Run, 100, {}}), &backend, {},
                      ast::program_hash(prog));
  runtime::RunOptions ro;
  if (sc.max_ticks) ro.max_ticks = *sc.max_ticks;
  return eng.run_mission(ro);
}

runtime::Report run(const std::string& name) {
  return run(sim::load_scenario_file(support::fixture("scenarios/" + name + ".scn")));
}

const char* kBoot = R"(
(defsv power :states (Off On) :init Off :transitions :all)
(defevent power_on :effects (power On))
(defskill boot
  :time_interval [0, 1]
  :action (boot)
  :success (up (:effects (power On)))
  :failure (stuck (:effects ())))
(defskill main
  :body ((boot) (if (= boot.status success) (success done)) (failure broken))
  :success (done (:effects ()))
  :failure (broken (:effects ())))
)";

}  // namespace

TEST(Runtime, NominalMissionSucceeds) {
  const auto r = run("nominal");
  EXPECT_EQ(r.stop_reason, "mission_done");
  EXPECT_EQ(r.statuses.at("uav_mission"), "success");
  EXPECT_EQ(r.results.at("uav_mission"), "mission_accomplished");
  EXPECT_EQ(r.state_variables.at("mission_status"), "Succeeded");
  EXPECT_EQ(r.undershoot_warnings + r.overshoot_warnings + r.postcondition_warnings, 0);
  EXPECT_FALSE(r.fault);
}

TEST(Runtime, SameSeedSameTrace) {
  const auto a = run("nominal");
  const auto b = run("nominal");
  ASSERT_EQ(a.trace.size(), b.trace.size());
  EXPECT_EQ(a.trace, b.trace);
}

TEST(Runtime, SeedChangesDrawnDurations) {
  auto sc = sim::load_scenario_file(support::fixture("scenarios/nominal.scn"));
  std::set<std::int64_t> lengths;
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 6}) {
    sc.seed = seed;
    lengths.insert(run(sc).ticks);
  }
  EXPECT_GT(lengths.size(), 1u);
}

TEST(Runtime, TraceTicksNeverDecrease) {
  const auto r = run("battery_critical");
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i - 1].tick, r.trace[i].tick);
  EXPECT_EQ(r.trace.front().kind, "program");
}

TEST(Runtime, BatteryCriticalTriggersTheMonitor) {
  const auto r = run("battery_critical");
  std::int64_t injected = -1, start = -1;
  for (const auto& e : r.trace) {
    if (e.kind == "event" && e.message == "battery_to_critical") injected = e.tick;
    if (injected >= 0 && start < 0 && e.kind == "start" && e.process == "set_velocity") start = e.tick;
  }
  ASSERT_GE(injected, 0);
  ASSERT_GE(start, 0);
  EXPECT_LE(start - injected, 2);
  EXPECT_EQ(r.statuses.at("set_velocity"), "success");
  EXPECT_EQ(r.statuses.at("goto_waypoint"), "failed_inv");
}

TEST(Runtime, TimingWarningsKeepTheOutcome) {
  const auto early = run("takeoff_0.5s");
  EXPECT_EQ(early.undershoot_warnings, 1);
  EXPECT_EQ(early.overshoot_warnings, 0);
  EXPECT_EQ(early.statuses.at("takeoff"), "success");
  const auto late = run("takeoff_4s");
  EXPECT_EQ(late.overshoot_warnings, 1);
  EXPECT_EQ(late.undershoot_warnings, 0);
  EXPECT_EQ(late.statuses.at("takeoff"), "success");
  EXPECT_EQ(late.results.at("takeoff"), "at_altitude");
}

TEST(Runtime, IllegalTransitionStopsTheRun) {
  const auto r = run("battery_good_while_critical");
  EXPECT_EQ(r.stop_reason, "fault");
  EXPECT_EQ(r.fault_kind, "IllegalTransitionFault");
  ASSERT_TRUE(r.fault);
  EXPECT_NE(r.fault->find("Critical to Good"), std::string::npos);
  EXPECT_EQ(r.trace.back().kind, "fault");
}

TEST(Runtime, MissingLocalizationHitsTheTickLimit) {
  const auto r = run("no_localization");
  EXPECT_EQ(r.stop_reason, "max_ticks");
  EXPECT_EQ(r.ticks, 15000);
  EXPECT_GE(r.overshoot_warnings, 1);
  EXPECT_FALSE(r.blocked_waits.empty());
}

TEST(Runtime, UnknownInputsAreRejected) {
  sim::Scenario sc;
  sim::SimBackend backend(sc, drone(), 100);
  runtime::Engine eng(translate::assemble(drone(), {translate::Mode::Run, 100, {}}), &backend);
  EXPECT_THROW(eng.inject_event("no_such_event"), std::invalid_argument);
  EXPECT_THROW(eng.inject_event("none"), std::invalid_argument);
  EXPECT_THROW(eng.interrupt_skill("no_such_skill"), std::invalid_argument);
  EXPECT_NO_THROW(eng.inject_event("battery_to_low"));
}

TEST(Runtime, UndeclaredReturnTagFaults) {
  const auto prog = ast::load_program(kBoot);
  sim::Scenario sc;
  sc.strict = false;
  sc.commands["boot"] = {{0, 0, {"exploded"}, {}}};
  const auto r = run(sc, prog);
  EXPECT_EQ(r.fault_kind, "IllegalReturnFault");
}

TEST(Runtime, FailureOutcomePropagates) {
  const auto prog = ast::load_program(kBoot);
  sim::Scenario sc;
  sc.commands["boot"] = {{1, 1, {"stuck"}, {}}};
  const auto r = run(sc, prog);
  EXPECT_EQ(r.stop_reason, "mission_done");
  EXPECT_EQ(r.statuses.at("boot"), "failure");
  EXPECT_EQ(r.statuses.at("main"), "failure");
  EXPECT_EQ(r.state_variables.at("power"), "Off");
}

TEST(Runtime, StatusesStayInTheStatusDomain) {
  for (const char* s : {"nominal", "battery_critical", "takeoff_4s"}) {
    const auto r = run(s);
    for (const auto& [skill, status] : r.statuses)
      EXPECT_NE(std::find(ir::kStatusLabels.begin(), ir::kStatusLabels.end(), status), ir::kStatusLabels.end())
          << s << " " << skill << " " << status;
  }
}

TEST(Runtime, HandWrittenRunNetworkWithoutBackend) {
  std::ifstream in(support::fixture("cheat_detector_run.tts.json"));
  translate::TranslationUnit unit;
  unit.mode = translate::Mode::Run;
  unit.network = ir::network_from_json(nlohmann::json::parse(in));
  runtime::Engine eng(std::move(unit), nullptr);
  for (int t = 0; t < 30; ++t) {
    if (t >= 5 && t <= 7) eng.inject_event("click");
    eng.run_tick();
  }
  EXPECT_EQ(eng.value_of("cheat"), "true");
  bool caught = false;
  for (const auto& e : eng.trace()) caught |= e.transition == "caught";
  EXPECT_TRUE(caught);
}

TEST(Scenario, RejectsMalformedDocuments) {
  using nlohmann::json;
  EXPECT_THROW(sim::parse_scenario(json::array()), std::invalid_argument);
  EXPECT_THROW(sim::parse_scenario(json{{"commands", {{"takeoff", {{"duration_ticks", 5}}}}}}),
               std::invalid_argument);
  EXPECT_THROW(sim::parse_scenario(json{{"commands", {{"takeoff", {{"duration_ticks", {5, 2}}, {"outcome", "x"}}}}}}),
               std::invalid_argument);
  EXPECT_THROW(sim::parse_scenario(json{{"timeline", {{{"tick", 5}, {"event", "a"}}, {{"tick", 2}, {"event", "b"}}}}}),
               std::invalid_argument);
  EXPECT_THROW(sim::parse_scenario(json{{"timeline", {{{"tick", 1}}}}}), std::invalid_argument);
}

TEST(Scenario, ValidationChecksNamesAndTags) {
  auto sc = sim::load_scenario_file(support::fixture("scenarios/nominal.scn"));
  EXPECT_TRUE(sim::validate_scenario(sc, drone(), 100).empty());
  auto bad_tag = sc;
  bad_tag.commands["takeoff"][0].outcomes = {"teleported"};
  EXPECT_THROW(sim::validate_scenario(bad_tag, drone(), 100), std::invalid_argument);
  auto bad_event = sc;
  bad_event.timeline.push_back({9000, "battery_to_empty", ""});
  EXPECT_THROW(sim::validate_scenario(bad_event, drone(), 100), std::invalid_argument);
  auto bad_skill = sc;
  bad_skill.commands["hover"] = sc.commands["takeoff"];
  EXPECT_THROW(sim::validate_scenario(bad_skill, drone(), 100), std::invalid_argument);
}

TEST(Scenario, OutOfIntervalDurationsWarn) {
  const auto sc = sim::load_scenario_file(support::fixture("scenarios/takeoff_4s.scn"));
  const auto w = sim::validate_scenario(sc, drone(), 100);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("takeoff"), std::string::npos);
}

TEST(SimBackend, UnscriptedSkillsFinishAtTheirMinimum) {
  const auto prog = ast::load_program(kBoot);
  sim::Scenario sc;
  sim::SimBackend backend(sc, prog, 100);
  runtime::Engine eng(translate::assemble(prog, {translate::Mode::Run, 100, {}}), &backend);
  const auto r = eng.run_mission({});
  ASSERT_EQ(backend.draws().size(), 1u);
  EXPECT_EQ(backend.draws()[0].skill, "boot");
  EXPECT_EQ(backend.draws()[0].duration, 0);
  EXPECT_EQ(backend.draws()[0].tag, "up");
  EXPECT_EQ(r.statuses.at("main"), "success");
}

TEST(SimBackend, BehaviourListsAreConsumedInOrder) {
  const std::string src = std::string(kBoot).replace(std::string(kBoot).find("((boot) (if"), 11, "((boot) (boot) (if");
  const auto prog = ast::load_program(src);
  sim::Scenario sc;
  sc.commands["boot"] = {{3, 3, {"stuck"}, {}}, {5, 5, {"up"}, {}}};
  sim::SimBackend backend(sc, prog, 100);
  runtime::Engine eng(translate::assemble(prog, {translate::Mode::Run, 100, {}}), &backend);
  const auto r = eng.run_mission({});
  ASSERT_EQ(backend.draws().size(), 2u);
  EXPECT_EQ(backend.draws()[0].tag, "stuck");
  EXPECT_EQ(backend.draws()[1].tag, "up");
  EXPECT_EQ(backend.draws()[1].duration, 5);
  EXPECT_EQ(r.statuses.at("main"), "success");
}

TEST(Stdio, ParsesChildLines) {
  runtime::StdioMessage m;
  ASSERT_TRUE(runtime::parse_stdio_line("DONE takeoff at_altitude {\"h\": 2}", m));
  EXPECT_EQ(m.kind, runtime::StdioMessage::Kind::Done);
  EXPECT_EQ(m.name, "takeoff");
  EXPECT_EQ(m.tag, "at_altitude");
  EXPECT_EQ(m.result["h"], 2);
  ASSERT_TRUE(runtime::parse_stdio_line("DONE takeoff grounded", m));
  EXPECT_TRUE(m.result.is_null());
  ASSERT_TRUE(runtime::parse_stdio_line("EVENT battery_to_low", m));
  EXPECT_EQ(m.kind, runtime::StdioMessage::Kind::Event);
  EXPECT_EQ(m.name, "battery_to_low");
  EXPECT_FALSE(runtime::parse_stdio_line("EVENT a b", m));
  EXPECT_FALSE(runtime::parse_stdio_line("DONE takeoff", m));
  EXPECT_FALSE(runtime::parse_stdio_line("DONE takeoff x {broken", m));
  EXPECT_FALSE(runtime::parse_stdio_line("HELLO", m));
}

TEST(Stdio, ChildProcessCompletesTheMission) {
  const auto prog = ast::load_program(kBoot);
  runtime::StdioBackend backend({"/bin/sh", "-c",
                                 "while read verb skill rest; do "
                                 "[ \"$verb\" = START ] && echo \"DONE $skill up {}\"; done"});
  runtime::Engine eng(translate::assemble(prog, {translate::Mode::Run, 100, {}}), &backend);
  backend.attach(eng);
  runtime::RunOptions ro;
  ro.clock = runtime::ClockMode::Wall;
  ro.max_ticks = 500;
  const auto r = eng.run_mission(ro);
  EXPECT_EQ(r.stop_reason, "mission_done");
  EXPECT_EQ(r.statuses.at("main"), "success");
  EXPECT_EQ(r.state_variables.at("power"), "On");
  EXPECT_TRUE(backend.rejected().empty());
}
