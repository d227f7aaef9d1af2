#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "proskill/checker.hpp"
#include "proskill/ir_json.hpp"
#include "proskill/parser.hpp"
#include "proskill/semantics.hpp"
#include "proskill/translator.hpp"
#include "support/models.hpp"

using namespace proskill;
using namespace proskill::ir;

namespace {

ProcessDef process(const std::string& name, std::vector<std::string> states) {
  ProcessDef p;
  p.name = name;
  for (auto& s : states) p.states.push_back({std::move(s), Marker::None, ""});
  return p;
}

Transition edge(const std::string& name, int from, int to, Value lo, Value hi) {
  Transition t;
  t.name = name;
  t.from = from;
  t.to = to;
  t.lo = lo;
  t.hi = hi;
  return t;
}

// p: s0 --[lo,hi]--> s1
ProcessNetwork one_step(Value lo, Value hi) {
  ProcessNetwork net;
  net.name = "one_step";
  auto p = process("p", {"s0", "s1"});
  p.transitions.push_back(edge("t", 0, 1, lo, hi));
  net.processes.push_back(p);
  return net;
}

}  // namespace

TEST(Semantics, WindowOpensAtLowerBound) {
  const auto net = one_step(2, 3);
  const Semantics sem(net);
  auto c = sem.initial();
  EXPECT_TRUE(sem.enabled(c).empty());
  EXPECT_TRUE(sem.can_advance(c));
  c = *sem.advance_time(c);
  c = *sem.advance_time(c);
  EXPECT_EQ(c.clocks[0], 2);
  ASSERT_EQ(sem.enabled(c).size(), 1u);
  c = *sem.advance_time(c);
  EXPECT_EQ(c.clocks[0], 3);
  // Waiting longer would overrun the window.
  EXPECT_FALSE(sem.can_advance(c));
  EXPECT_FALSE(sem.advance_time(c).has_value());
  c = sem.fire(c, sem.enabled(c)[0]);
  EXPECT_EQ(c.loc[0], 1);
  EXPECT_EQ(c.clocks[0], 0);
}

TEST(Semantics, ZeroWindowIsUrgent) {
  const auto net = one_step(0, 0);
  const Semantics sem(net);
  const auto c = sem.initial();
  EXPECT_EQ(sem.enabled(c).size(), 1u);
  EXPECT_FALSE(sem.can_advance(c));
}

TEST(Semantics, UnboundedWindowNeverBlocksTime) {
  const auto net = one_step(0, kInf);
  const Semantics sem(net);
  auto c = sem.initial();
  for (int i = 0; i < 5; ++i) c = *sem.advance_time(c);
  EXPECT_EQ(sem.enabled(c).size(), 1u);
  EXPECT_FALSE(sem.is_deadlock(c));
}

TEST(Semantics, ClocksSaturateAtTheStateCap) {
  const auto net = one_step(2, kInf);
  const Semantics sem(net);
  EXPECT_EQ(sem.clock_cap(0, 0), 2);
  auto c = sem.initial();
  for (int i = 0; i < 10; ++i) c = *sem.advance_time(c);
  EXPECT_EQ(c.clocks[0], 2);
  EXPECT_EQ(sem.clock_cap(0, 1), 0);
}

TEST(Semantics, TerminalStateIsADeadlock) {
  const auto net = one_step(1, 1);
  const Semantics sem(net);
  auto c = *sem.advance_time(sem.initial());
  EXPECT_FALSE(sem.is_deadlock(c));
  c = sem.fire(c, sem.enabled(c)[0]);
  EXPECT_TRUE(sem.is_deadlock(c));
}

TEST(Semantics, PortsFireAllParticipantsTogether) {
  ProcessNetwork net;
  net.ports.push_back({"go", "go"});
  for (const char* name : {"a", "b"}) {
    auto p = process(name, {"idle", "done"});
    auto t = edge("go", 0, 1, 0, kInf);
    t.port = 0;
    p.transitions.push_back(t);
    net.processes.push_back(p);
  }
  auto c0 = process("c", {"x"});
  net.processes.push_back(c0);
  net.check_well_formed();
  const Semantics sem(net);
  auto c = sem.initial();
  const auto en = sem.enabled(c);
  ASSERT_EQ(en.size(), 1u);
  EXPECT_EQ(en[0].parts.size(), 2u);
  c = sem.fire(c, en[0]);
  EXPECT_EQ(c.loc[0], 1);
  EXPECT_EQ(c.loc[1], 1);
  // One side alone cannot fire the port.
  auto half = sem.initial();
  half.loc[1] = 1;
  EXPECT_TRUE(sem.enabled(half).empty());
}

TEST(Semantics, GuardsAndActions) {
  ProcessNetwork net;
  net.vars.push_back({"x", VarKind::Nat, {}, 0, 2, 0});
  auto p = process("p", {"s"});
  auto inc = edge("inc", 0, 0, 0, kInf);
  inc.guard = Expr::lt(0, 2);
  inc.actions.push_back({0, 1, 0});
  p.transitions.push_back(inc);
  net.processes.push_back(p);
  const Semantics sem(net);
  auto c = sem.initial();
  c = sem.fire(c, sem.enabled(c)[0]);
  c = sem.fire(c, sem.enabled(c)[0]);
  EXPECT_EQ(c.vals[0], 2);
  EXPECT_TRUE(sem.enabled(c).empty());
  EXPECT_TRUE(sem.eval(Expr::conj({Expr::eq(0, 2), Expr::at(0, 0)}), c));
  EXPECT_FALSE(sem.eval(Expr::disj({Expr::ne(0, 2), Expr::f()}), c));
}

TEST(Semantics, AssignmentOutOfRangeFaults) {
  ProcessNetwork net;
  net.vars.push_back({"x", VarKind::Nat, {}, 0, 1, 1});
  auto p = process("p", {"s"});
  auto inc = edge("inc", 0, 0, 0, kInf);
  inc.actions.push_back({0, 1, 0});
  p.transitions.push_back(inc);
  net.processes.push_back(p);
  const Semantics sem(net);
  const auto c = sem.initial();
  EXPECT_THROW(sem.fire(c, sem.enabled(c)[0]), RangeFault);
}

TEST(Semantics, CandidatesComeInCanonicalOrder) {
  const auto prog = ast::load_program_file(support::fixture("drone.psk"));
  const auto unit = translate::assemble(prog, {});
  const Semantics sem(unit.network);
  auto c = sem.initial();
  for (int step = 0; step < 50; ++step) {
    const auto en = sem.enabled(c);
    if (en.empty()) break;
    for (std::size_t i = 1; i < en.size(); ++i) EXPECT_LT(en[i - 1], en[i]);
    c = sem.fire(c, en.back());
  }
}

TEST(WellFormed, RejectsDanglingStateAndInvertedWindow) {
  auto net = one_step(0, 1);
  net.processes[0].transitions[0].to = 7;
  EXPECT_THROW(net.check_well_formed(), std::invalid_argument);
  net = one_step(3, 1);
  EXPECT_THROW(net.check_well_formed(), std::invalid_argument);
  net = one_step(0, 1);
  net.processes[0].transitions[0].guard = Expr::eq(4, 0);
  EXPECT_THROW(net.check_well_formed(), std::invalid_argument);
}

TEST(IrJson, DroneNetworksRoundTrip) {
  const auto prog = ast::load_program_file(support::fixture("drone.psk"));
  for (auto mode : {translate::Mode::Check, translate::Mode::Run}) {
    const auto net = translate::assemble(prog, {mode, 100, {}}).network;
    const auto back = network_from_json(to_json(net));
    EXPECT_EQ(dump_network(back), dump_network(net));
    EXPECT_EQ(network_hash(back), network_hash(net));
  }
}

TEST(IrJson, FixturesRoundTrip) {
  for (const char* f : {"triple_click.tts.json", "cheat_detector.tts.json", "cheat_detector_run.tts.json"}) {
    std::ifstream in(support::fixture(f));
    const auto j = nlohmann::json::parse(in);
    const auto net = network_from_json(j);
    EXPECT_EQ(to_json(net), to_json(network_from_json(to_json(net)))) << f;
  }
}

TEST(IrJson, UnknownNamesAreRejected) {
  std::ifstream in(support::fixture("triple_click.tts.json"));
  auto j = nlohmann::json::parse(in);
  j["processes"][0]["transitions"][0]["to"] = "nowhere";
  EXPECT_THROW(network_from_json(j), std::invalid_argument);
}

TEST(IrJson, ExpressionsRoundTrip) {
  const auto net = translate::assemble(ast::load_program_file(support::fixture("drone.psk")), {}).network;
  for (const auto& p : net.processes)
    for (const auto& t : p.transitions)
      EXPECT_EQ(expr_from_json(net, expr_to_json(net, t.guard)), t.guard) << p.name << "." << t.name;
}

// Packing is injective on the configuration domain and set_* agree with pack.
TEST(Packer, RoundTripsRandomConfigurations) {
  const auto prog = ast::load_program_file(support::fixture("drone.psk"));
  const auto net = translate::assemble(prog, support::reduced_drone()).network;
  const Semantics sem(net);
  const check::Packer packer(sem);
  std::mt19937_64 rng(42);
  auto pick = [&](Value lo, Value hi) { return lo + static_cast<Value>(rng() % (hi - lo + 1)); };
  std::vector<std::uint64_t> w(packer.words()), w2(packer.words());
  for (int iter = 0; iter < 2000; ++iter) {
    Configuration c = sem.initial();
    for (std::size_t p = 0; p < net.processes.size(); ++p) {
      c.loc[p] = pick(0, static_cast<Value>(net.processes[p].states.size()) - 1);
      c.clocks[p] = pick(0, sem.max_clock_cap(static_cast<int>(p)));
    }
    for (std::size_t v = 0; v < net.vars.size(); ++v) c.vals[v] = pick(net.vars[v].min, net.vars[v].max);
    packer.pack(c, w.data());
    Configuration back = sem.initial();
    packer.unpack(w.data(), back);
    ASSERT_EQ(back, c);

    const int p = static_cast<int>(rng() % net.processes.size());
    const int v = static_cast<int>(rng() % net.vars.size());
    Configuration d = c;
    d.loc[p] = pick(0, static_cast<Value>(net.processes[p].states.size()) - 1);
    d.clocks[p] = pick(0, sem.max_clock_cap(p));
    d.vals[v] = pick(net.vars[v].min, net.vars[v].max);
    packer.set_loc(w.data(), p, d.loc[p]);
    packer.set_clock(w.data(), p, d.clocks[p]);
    packer.set_val(w.data(), v, d.vals[v]);
    packer.pack(d, w2.data());
    ASSERT_EQ(w, w2);
  }
}
