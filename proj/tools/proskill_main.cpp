// proskill: compile, check, run and replay ProSkill programs.
//
// Exit codes:
//   0  success (verdicts as expected, mission done, trace contained)
//   1  a verdict contradicts its expectation, a runtime fault, a divergent replay
//   2  inconclusive: exploration truncated, or the run hit its tick limit
//   3  invalid input: diagnostics, unreadable files, bad flags, hash mismatch

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "proskill/ast_io.hpp"
#include "proskill/checker.hpp"
#include "proskill/ir_json.hpp"
#include "proskill/parser.hpp"
#include "proskill/property.hpp"
#include "proskill/replay.hpp"
#include "proskill/runtime.hpp"
#include "proskill/scenario.hpp"
#include "proskill/sim_backend.hpp"
#include "proskill/stdio_backend.hpp"
#include "proskill/translator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proskill;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInput = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << data;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// "250" is ticks, "2.5s" is seconds converted with the tick rate.
std::int64_t parse_ticks(const std::string& text, int tick_rate) {
  if (text.empty()) throw InputError("empty time value");
  try {
    if (text.back() == 's')
      return translate::to_ticks(std::stod(text.substr(0, text.size() - 1)), tick_rate);
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw InputError("bad tick count " + text);
    return v;
  } catch (const std::logic_error&) {
    throw InputError("bad time value " + text);
  }
}

double parse_seconds(const std::string& text) {
  std::string t = text;
  if (!t.empty() && t.back() == 's') t.pop_back();
  try {
    return std::stod(t);
  } catch (const std::logic_error&) {
    throw InputError("bad duration " + text);
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("proskill");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");
  const char* level = std::getenv("PROSKILL_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

struct EnvFlags {
  std::vector<std::string> events;
  int max_occurrences = 0;
  bool no_interrupts = false;
  bool legal_only = false;
  bool quiescent = false;
  std::string count_scope = "event";

  void add(CLI::App* cmd) {
    cmd->add_option("--events", events, "Events offered by the CHECK environment")
        ->delimiter(',');
    cmd->add_option("--max-occurrences", max_occurrences,
                    "Bound on occurrences of each offered event (0 = unbounded)");
    cmd->add_flag("--no-interrupts", no_interrupts, "Environment never interrupts skills");
    cmd->add_flag("--legal-only", legal_only,
                  "Offer an event only when its state changes are allowed");
    cmd->add_option("--count-scope", count_scope,
                    "What --max-occurrences bounds: each event, or each state variable")
        ->check(CLI::IsMember({"event", "sv"}));
    cmd->add_flag("--quiescent-env", quiescent,
                  "Offer inputs only when no zero-delay internal step is pending");
  }
  translate::EnvOptions options() const {
    translate::EnvOptions e;
    if (!events.empty()) e.events = events;
    e.max_occurrences = max_occurrences;
    e.interrupts = !no_interrupts;
    e.legal_only = legal_only;
    e.quiescent = quiescent;
    e.count_scope = count_scope == "sv" ? translate::CountScope::StateVariable
                                        : translate::CountScope::Event;
    return e;
  }
};

struct ProgramFlags {
  std::string path;
  std::string entry;
  int tick_rate = 100;

  void add(CLI::App* cmd) {
    cmd->add_option("program", path, "ProSkill source file")->required();
    cmd->add_option("--entry", entry, "Entry composite skill");
    cmd->add_option("--tick-rate", tick_rate, "Model ticks per second")
        ->check(CLI::PositiveNumber);
  }
  ast::SkillProgram load() const {
    const std::string text = read_file(path);
    auto parsed = ast::parse_program(text);
    Diagnostics diags = parsed.diagnostics;
    std::optional<ast::SkillProgram> prog;
    if (parsed.ok()) {
      auto v = ast::validate_program(std::move(*parsed.program),
                                     entry.empty() ? std::nullopt : std::optional(entry));
      diags.insert(diags.end(), v.diagnostics.begin(), v.diagnostics.end());
      if (v.ok()) prog = std::move(v.program);
    }
    for (const auto& d : diags) std::cerr << format_diagnostic(d, path) << "\n";
    if (!prog) throw DiagnosticError(diags);
    return std::move(*prog);
  }
};

void print_inventory(const translate::TranslationUnit& unit) {
  int total = 0;
  std::printf("%-12s %5s\n", "category", "count");
  for (const auto& cat : translate::kInventoryCategories) {
    const auto it = unit.inventory.find(cat);
    const int n = it == unit.inventory.end() ? 0 : it->second;
    total += n;
    std::printf("%-12s %5d\n", cat.c_str(), n);
  }
  std::printf("%-12s %5d\n", "total", total);
}

const char* expect_text(const std::optional<bool>& e) {
  if (!e) return "-";
  return *e ? "TRUE" : "FALSE";
}

// ---- compile ----

int cmd_compile(const ProgramFlags& pf, const EnvFlags& ef, const std::string& out,
                const std::string& mode) {
  const auto prog = pf.load();
  const fs::path dir(out);
  std::optional<translate::TranslationUnit> shown;
  if (mode == "both" || mode == "check") {
    auto u = translate::assemble(prog, {translate::Mode::Check, pf.tick_rate, ef.options()});
    write_atomic(dir / "check.tts.json", ir::dump_network(u.network) + "\n");
    write_atomic(dir / "inventory.json", translate::inventory_json(u).dump(2) + "\n");
    shown = std::move(u);
  }
  if (mode == "both" || mode == "run") {
    auto u = translate::assemble(prog, {translate::Mode::Run, pf.tick_rate, {}});
    write_atomic(dir / "run.tts.json", ir::dump_network(u.network) + "\n");
    write_atomic(dir / "bindings.json", translate::bindings_json(u).dump(2) + "\n");
    if (!shown) {
      write_atomic(dir / "inventory.json", translate::inventory_json(u).dump(2) + "\n");
      shown = std::move(u);
    }
  }
  print_inventory(*shown);
  return kExitOk;
}

// ---- check ----

int cmd_check(const ProgramFlags& pf, const EnvFlags& ef, const std::string& out,
              const std::string& props_path, const std::string& max_configs,
              const std::string& budget, const std::string& max_ticks) {
  ir::ProcessNetwork net;
  std::vector<check::Property> props;
  const bool is_net = pf.path.size() > 9 && pf.path.ends_with(".tts.json");
  if (is_net) {
    net = ir::network_from_json(json::parse(read_file(pf.path)));
    props = check::default_properties(net);
  } else {
    const auto prog = pf.load();
    auto unit = translate::assemble(prog, {translate::Mode::Check, pf.tick_rate, ef.options()});
    props = check::default_properties(prog, unit);
    net = std::move(unit.network);
  }
  if (!props_path.empty()) {
    auto user = check::parse_properties(read_file(props_path), net);
    props.insert(props.end(), user.begin(), user.end());
  }
  check::Limits limits;
  if (!max_configs.empty()) limits.max_configs = std::stoull(max_configs);
  if (!budget.empty()) limits.budget_seconds = parse_seconds(budget);
  if (!max_ticks.empty()) limits.max_ticks = parse_ticks(max_ticks, net.tick_rate);
  spdlog::info("checking {} properties", props.size());

  const auto verdicts = check::check_all(net, props, limits);
  json jv = json::array();
  for (const auto& v : verdicts) jv.push_back(v.to_json());
  const int code = check::exit_code(verdicts);
  json doc = {{"network", net.name}, {"hash", ir::network_hash(net)}, {"verdicts", jv},
              {"exit_code", code}};
  write_atomic(fs::path(out) / "verdicts.json", doc.dump(2) + "\n");

  std::printf("%-40s %-14s %-8s %-7s %12s\n", "property", "kind", "result", "expect", "configs");
  for (const auto& v : verdicts)
    std::printf("%-40s %-14s %-8s %-7s %12llu%s\n", v.property.c_str(),
                check::to_string(v.kind).c_str(), check::to_string(v.result).c_str(),
                expect_text(v.expect), static_cast<unsigned long long>(v.stats.configurations),
                v.result == check::Result::Unknown ? "  (inconclusive)"
                : v.as_expected()                  ? ""
                                                   : "  <-- unexpected");
  for (const auto& v : verdicts)
    if (v.stats.truncated) {
      std::printf("exploration truncated: %s\n", v.stats.truncation.c_str());
      break;
    }
  return code;
}

// ---- run ----

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

int cmd_run(const ProgramFlags& pf, const std::string& out, const std::string& scenario_path,
            const std::string& clock, std::optional<std::uint64_t> seed,
            const std::string& max_ticks, const std::string& backend_cmd) {
  const auto prog = pf.load();
  auto unit = translate::assemble(prog, {translate::Mode::Run, pf.tick_rate, {}});

  runtime::RunOptions ro;
  ro.clock = clock == "wall" ? runtime::ClockMode::Wall : runtime::ClockMode::Virtual;

  std::unique_ptr<runtime::Backend> backend;
  std::optional<sim::Scenario> scenario;
  if (!backend_cmd.empty()) {
    backend = std::make_unique<runtime::StdioBackend>(split_words(backend_cmd));
  } else {
    if (scenario_path.empty()) throw InputError("run needs --scenario or --backend-cmd");
    try {
      scenario = sim::load_scenario_file(scenario_path);
      if (seed) scenario->seed = *seed;
      for (const auto& w : sim::validate_scenario(*scenario, prog, pf.tick_rate))
        spdlog::warn("{}", w);
    } catch (const std::invalid_argument& e) {
      throw InputError(scenario_path + ": " + e.what());
    }
    if (scenario->max_ticks) ro.max_ticks = *scenario->max_ticks;
    backend = std::make_unique<sim::SimBackend>(*scenario, prog, pf.tick_rate);
  }
  if (!max_ticks.empty()) ro.max_ticks = parse_ticks(max_ticks, pf.tick_rate);

  runtime::Engine engine(std::move(unit), backend.get(), {}, ast::program_hash(prog));
  if (auto* sb = dynamic_cast<runtime::StdioBackend*>(backend.get())) sb->attach(engine);
  const auto rep = engine.run_mission(ro);

  std::ostringstream trace;
  write_trace(trace, rep.trace);
  write_atomic(fs::path(out) / "trace.jsonl", trace.str());
  write_atomic(fs::path(out) / "report.json", rep.to_json().dump(2) + "\n");

  std::printf("stop: %s after %lld ticks\n", rep.stop_reason.c_str(),
              static_cast<long long>(rep.ticks));
  if (const std::string& e = engine.unit().entry; !e.empty()) {
    std::printf("%s: %s (%s)\n", e.c_str(), rep.statuses.at(e).c_str(), rep.results.at(e).c_str());
  }
  for (const auto& [sv, val] : rep.state_variables) std::printf("  %s = %s\n", sv.c_str(), val.c_str());
  std::printf("warnings: undershoot %d, overshoot %d, postcondition %d, jitter %d\n",
              rep.undershoot_warnings, rep.overshoot_warnings, rep.postcondition_warnings,
              rep.jitter_warnings);
  for (const auto& w : rep.blocked_waits) std::printf("blocked: %s\n", w.c_str());
  if (rep.fault) {
    std::printf("fault (%s): %s\n", rep.fault_kind.c_str(), rep.fault->c_str());
    return kExitFailed;
  }
  if (rep.stop_reason != "mission_done") return kExitInconclusive;
  const std::string& e = engine.unit().entry;
  return e.empty() || rep.statuses.at(e) == "success" ? kExitOk : kExitFailed;
}

// ---- replay ----

int cmd_replay(const std::string& trace_path, const ProgramFlags& pf, const EnvFlags& ef,
               const std::string& net_path) {
  std::ifstream in(trace_path);
  if (!in) throw InputError("cannot read " + trace_path);
  const Trace trace = read_trace(in);
  int rate = pf.tick_rate;
  for (const auto& e : trace)
    if (e.kind == "program") {
      const auto j = json::parse(e.message, nullptr, false);
      if (j.is_object() && j.contains("tick_rate")) rate = j["tick_rate"].get<int>();
      break;
    }

  ir::ProcessNetwork net;
  std::string hash;
  if (!net_path.empty()) {
    net = ir::network_from_json(json::parse(read_file(net_path)));
  } else {
    if (pf.path.empty()) throw InputError("replay needs --program or --net");
    const auto prog = pf.load();
    net = translate::assemble(prog, {translate::Mode::Check, rate, ef.options()}).network;
    hash = ast::program_hash(prog);
  }
  replay::ReplayResult r;
  try {
    r = replay::replay(net, trace, hash);
  } catch (const replay::HashMismatch& e) {
    throw InputError(e.what());
  }
  if (r.verdict == replay::ReplayResult::Verdict::Contained) {
    std::printf("CONTAINED (%zu events, frontier <= %zu)\n", trace.size(), r.max_frontier);
    return kExitOk;
  }
  std::printf("DIVERGENT at step %lld (tick %lld): %s\n", static_cast<long long>(r.step),
              static_cast<long long>(r.tick), r.message.c_str());
  return kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"ProSkill acting programs: compile, check, run, replay"};
  app.require_subcommand(1);

  ProgramFlags pf;
  EnvFlags ef;
  std::string out = ".";
  std::string mode = "both";
  std::string props, max_configs, budget, max_ticks;
  std::string scenario, clock = "virtual", backend_cmd;
  std::optional<std::uint64_t> seed;
  std::string trace_path, net_path;

  auto* compile = app.add_subcommand("compile", "Write CHECK/RUN networks, inventory and bindings");
  pf.add(compile);
  ef.add(compile);
  compile->add_option("--out", out, "Output directory");
  compile->add_option("--mode", mode, "Networks to write")
      ->check(CLI::IsMember({"both", "check", "run"}));

  auto* chk = app.add_subcommand("check", "Explore the CHECK network and verify properties");
  pf.add(chk);
  ef.add(chk);
  chk->add_option("--out", out, "Output directory");
  chk->add_option("--mode", mode, "Only check is supported")->check(CLI::IsMember({"both", "check"}));
  chk->add_option("--props", props, "Property file");
  chk->add_option("--max-configs", max_configs, "Configuration limit");
  chk->add_option("--budget", budget, "Wall-clock budget in seconds");
  chk->add_option("--max-ticks", max_ticks, "Model time bound (ticks, or seconds with s)");

  auto* run = app.add_subcommand("run", "Execute the RUN network against a backend");
  pf.add(run);
  run->add_option("--out", out, "Output directory");
  run->add_option("--mode", mode, "Only run is supported")->check(CLI::IsMember({"both", "run"}));
  run->add_option("--scenario", scenario, "Simulated backend scenario (.scn JSON)");
  run->add_option("--clock", clock, "virtual or wall")->check(CLI::IsMember({"virtual", "wall"}));
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--max-ticks", max_ticks, "Tick limit (ticks, or seconds with s)");
  run->add_option("--backend-cmd", backend_cmd, "External backend speaking the stdio protocol");

  auto* rep = app.add_subcommand("replay", "Check that a runtime trace is a CHECK behaviour");
  ProgramFlags rpf;
  rep->add_option("trace", trace_path, "trace.jsonl from proskill run")->required();
  rep->add_option("--program", rpf.path, "ProSkill source the trace was produced from");
  rep->add_option("--entry", rpf.entry, "Entry composite skill");
  rep->add_option("--net", net_path, "CHECK network (.tts.json) instead of a program");
  ef.add(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*compile) return cmd_compile(pf, ef, out, mode);
    if (*chk) return cmd_check(pf, ef, out, props, max_configs, budget, max_ticks);
    if (*run) return cmd_run(pf, out, scenario, clock, seed, max_ticks, backend_cmd);
    if (*rep) return cmd_replay(trace_path, rpf, ef, net_path);
  } catch (const DiagnosticError&) {
    return kExitInput;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const json::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailed;
  }
  return kExitOk;
}
