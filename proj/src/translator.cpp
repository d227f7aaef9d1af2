#include "proskill/translator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace proskill::translate {

using ir::Action;
using ir::Expr;
using ir::HostCall;
using ir::Marker;
using ir::Transition;
using ir::Value;
using ir::VarDecl;
using ir::VarKind;

std::string to_string(Mode m) { return m == Mode::Check ? "CHECK" : "RUN"; }

Value to_ticks(double seconds, int tick_rate) {
  return static_cast<Value>(std::llround(seconds * tick_rate));
}

namespace {

struct ProcBuilder {
  explicit ProcBuilder(ir::ProcessDef* proc) : p(proc) {}

  ir::ProcessDef* p;
  std::map<int, std::string> pending_log;
  std::set<std::string> names;
  int fresh = 0;

  int state(const std::string& name, Marker m = Marker::None, std::string note = {}) {
    std::string n = name;
    for (int k = 2; p->state_index(n) >= 0; ++k) n = name + "_" + std::to_string(k);
    p->states.push_back({n, m, std::move(note)});
    return static_cast<int>(p->states.size()) - 1;
  }
  int fresh_state() { return state("NS" + std::to_string(++fresh)); }

  Transition& add(int from, int to, Expr guard = Expr::t(), Value lo = 0, Value hi = 0) {
    std::string base = p->states[from].name + "_to_" + p->states[to].name;
    std::string n = base;
    for (int k = 2; names.count(n); ++k) n = base + "_" + std::to_string(k);
    names.insert(n);
    Transition t;
    t.name = n;
    t.from = from;
    t.to = to;
    t.lo = lo;
    t.hi = hi;
    t.guard = std::move(guard);
    if (auto it = pending_log.find(from); it != pending_log.end()) t.log = it->second;
    p->transitions.push_back(std::move(t));
    return p->transitions.back();
  }
  Transition& add_named(const std::string& name, int from, int to, Expr guard = Expr::t(),
                        Value lo = 0, Value hi = 0) {
    Transition& t = add(from, to, std::move(guard), lo, hi);
    names.erase(t.name);
    std::string n = name;
    for (int k = 2; names.count(n); ++k) n = name + "_" + std::to_string(k);
    names.insert(n);
    t.name = n;
    return t;
  }
};

struct BranchPlan {
  std::string record;
  std::string process;
  std::string owner;
  const std::vector<ast::Instruction>* body = nullptr;
};

struct Stable {
  enum class Kind { Wait, Call, Par } kind = Kind::Wait;
  int state = 0;
  std::string callee;
  std::vector<int> branches;  // record indices
};

struct BodyCtx {
  ProcBuilder* b = nullptr;
  int proc = 0;
  int self_rec = 0;
  const ast::CompositeSkillDef* owner = nullptr;
  bool branch = false;
  std::map<std::string, int> labels;
  std::map<std::string, int> outcomes;  // "success_tag" -> state
  std::vector<Stable> stable;
};

class Translator {
 public:
  Translator(const ast::SkillProgram& prog, const Options& opts)
      : prog_(prog), opts_(opts), check_(opts.mode == Mode::Check) {}

  TranslationUnit run();

 private:
  const ast::SkillProgram& prog_;
  Options opts_;
  bool check_;
  ir::ProcessNetwork net_;
  TranslationUnit unit_;

  std::map<std::string, int> sv_var_, sv_proc_, rec_, flag_, task_, undershoot_, overshoot_;
  std::map<std::string, int> proc_;
  std::vector<BranchPlan> branches_;
  std::map<const ast::Instruction*, std::vector<int>> par_branches_;  // -> branches_ idx
  std::map<const ast::Instruction*, int> arg_row_;
  std::map<std::string, int> level_;
  std::set<std::string> flagged_;  // composites and branches with abort machinery
  std::vector<std::string> offered_events_;
  std::vector<std::string> host_interrupts_;  // basic skills with an environment port
  std::map<std::string, std::vector<int>> count_var_;  // event -> its occurrence counters
  int ev_pending_ = -1, intr_pending_ = -1;
  // CHECK interrupt ports requested by composites, per basic target: (port, site process)
  std::map<std::string, std::vector<int>> site_ports_;
  std::map<std::pair<std::string, int>, int> site_port_of_;

  Value ticks(double s) const { return to_ticks(s, opts_.tick_rate); }
  int var(VarDecl v) {
    net_.vars.push_back(std::move(v));
    return static_cast<int>(net_.vars.size()) - 1;
  }
  int port(const std::string& name, const std::string& label = {}) {
    int i = net_.port_index(name);
    if (i >= 0) return i;
    net_.ports.push_back({name, label});
    return static_cast<int>(net_.ports.size()) - 1;
  }
  const ir::SkillRecordDecl& rec(const std::string& n) const { return net_.records[rec_.at(n)]; }
  Value caller_id(int record) const { return record + 2; }

  // planning
  void scan(const std::string& owner, const std::vector<ast::Instruction>& seq);
  void plan();
  void declare_vars();
  void declare_processes();

  // expressions
  Value sv_value(const std::string& sv, const std::string& v) const;
  Expr cond(const ast::Condition& c) const;
  Expr cond_after(const ast::Condition& c, const std::vector<ast::Assign>& effects) const;
  Expr precondition(const std::vector<ast::TaggedCondition>& pre) const;
  Expr postcondition(const ast::Outcome& o) const;
  Expr quiescent() const;
  void assign(std::vector<Action>& out, const std::vector<ast::Assign>& effects) const;
  Expr test(const ast::Test& t, bool positive) const;
  Value val_of(const std::string& skill, const std::string& v) const;

  // lowering
  void lower_state_variable(const ast::StateVarDef& sv);
  void lower_event(const ast::EventDef& ev);
  void lower_basic_check(const ast::BasicSkillDef& sk);
  void lower_basic_run(const ast::BasicSkillDef& sk);
  void lower_composite(const ast::CompositeSkillDef& sk);
  void lower_branch(const BranchPlan& bp);
  void lower_watchdog(const ast::CompositeSkillDef& sk);
  void add_site_ports(const ast::BasicSkillDef& sk);
  void synth_environment();

  void compile_seq(BodyCtx& ctx, const std::vector<ast::Instruction>& seq, int entry, int exit);
  void compile_instr(BodyCtx& ctx, const ast::Instruction& ins, int cur, int nxt);
  void add_abort(BodyCtx& ctx, int exit);
  int site_port(const std::string& target, int site_proc);
  int label_state(BodyCtx& ctx, const std::string& name);
};

void Translator::scan(const std::string& owner, const std::vector<ast::Instruction>& seq) {
  using K = ast::Instruction::Kind;
  for (const auto& ins : seq) {
    switch (ins.kind) {
      case K::Call:
        if (!ins.args.empty()) {
          std::vector<ir::CallArgument> row;
          for (const auto& a : ins.args) row.push_back({a.name, a.text, a.value});
          net_.arg_table.push_back(std::move(row));
          arg_row_[&ins] = static_cast<int>(net_.arg_table.size()) - 1;
        }
        break;
      case K::Parallel: {
        const int level = ++level_[owner];
        std::vector<int> ids;
        for (std::size_t i = 0; i < ins.branches.size(); ++i) {
          const std::string suffix = std::to_string(level) + "_" + std::to_string(i);
          branches_.push_back({owner + "_branch_" + suffix, "skill_branch_" + owner + "_" + suffix,
                               owner, &ins.branches[i]});
          ids.push_back(static_cast<int>(branches_.size()) - 1);
        }
        par_branches_[&ins] = ids;
        for (const auto& br : ins.branches) scan(owner, br);
        break;
      }
      case K::If:
        scan(owner, ins.body);
        scan(owner, ins.else_body);
        break;
      case K::While:
      case K::DoUntil: scan(owner, ins.body); break;
      default: break;
    }
  }
}

namespace {
void collect_interrupts(const std::vector<ast::Instruction>& seq, std::set<std::string>& out) {
  for (const auto& ins : seq) {
    if (ins.kind == ast::Instruction::Kind::Interrupt) out.insert(ins.name);
    collect_interrupts(ins.body, out);
    collect_interrupts(ins.else_body, out);
    for (const auto& br : ins.branches) collect_interrupts(br, out);
  }
}
}  // namespace

void Translator::plan() {
  for (const auto& c : prog_.composites) scan(c.name, c.body);

  // Composites that can receive an interrupt request, closed under calls.
  std::set<std::string> targets;
  if (check_) {
    for (const auto& c : prog_.composites) collect_interrupts(c.body, targets);
  } else {
    for (const auto& c : prog_.composites) targets.insert(c.name);
  }
  std::vector<std::string> work;
  for (const auto& t : targets)
    if (prog_.find_composite(t)) work.push_back(t);
  while (!work.empty()) {
    std::string c = work.back();
    work.pop_back();
    if (!flagged_.insert(c).second) continue;
    if (auto it = prog_.call_graph.find(c); it != prog_.call_graph.end())
      for (const auto& callee : it->second)
        if (prog_.find_composite(callee)) work.push_back(callee);
  }
  for (const auto& bp : branches_)
    if (flagged_.count(bp.owner)) flagged_.insert(bp.record);

  // Environment offer.
  for (const auto& e : prog_.events) {
    if (!check_ || !opts_.env.events) {
      offered_events_.push_back(e.name);
      continue;
    }
    const auto& sub = *opts_.env.events;
    if (std::find(sub.begin(), sub.end(), e.name) != sub.end()) offered_events_.push_back(e.name);
  }
  for (const auto& b : prog_.basics)
    if (b.interrupt && (!check_ || opts_.env.interrupts)) host_interrupts_.push_back(b.name);
}

void Translator::declare_vars() {
  for (const auto& sv : prog_.state_vars) {
    VarDecl v;
    v.name = sv.name;
    v.sv = sv.name;
    if (sv.enumerated) {
      v.kind = VarKind::Enum;
      v.labels = sv.values;
      v.max = static_cast<Value>(sv.values.size()) - 1;
    } else {
      v.kind = VarKind::Nat;
      v.min = sv.min;
      v.max = sv.max;
    }
    v.init = *v.parse(sv.init);
    sv_var_[sv.name] = var(std::move(v));
  }

  struct RecInfo {
    std::string name, kind;
    std::vector<std::string> vals;
    bool interruptible;
  };
  std::vector<RecInfo> infos;
  auto outcome_vals = [](const auto& sk) {
    std::vector<std::string> vals{"none"};
    for (const auto& o : sk.successes) vals.push_back(o.tag);
    for (const auto& o : sk.failures) vals.push_back(o.tag);
    vals.push_back("interrupted");
    return vals;
  };
  for (const auto& b : prog_.basics) {
    auto vals = outcome_vals(b);
    for (const auto& inv : b.invariants) vals.push_back("failed_inv_" + inv.tag);
    infos.push_back({b.name, "basic", vals, b.interrupt.has_value()});
  }
  for (const auto& c : prog_.composites) infos.push_back({c.name, "composite", outcome_vals(c), true});
  for (const auto& bp : branches_) infos.push_back({bp.record, "branch", {"none"}, false});

  std::vector<std::string> callers{"None", "ROOT"};
  for (const auto& r : infos) callers.push_back(r.name);
  const Value rows = static_cast<Value>(net_.arg_table.size());

  for (const auto& r : infos) {
    ir::SkillRecordDecl d;
    d.name = r.name;
    d.kind = r.kind;
    d.interruptible = r.interruptible;
    const std::string base = "skill[" + r.name + "]";
    d.caller = var({base + ".caller", VarKind::Enum, callers, 0,
                    static_cast<Value>(callers.size()) - 1, 0, false, {}});
    d.status = var({base + ".status", VarKind::Enum, ir::kStatusLabels, 0,
                    static_cast<Value>(ir::kStatusLabels.size()) - 1, 0, false, {}});
    d.inv_active = var({base + ".inv_active", VarKind::Bool, {}, 0, 1, 0, false, {}});
    d.arg_index = var({base + ".arg_index", VarKind::Nat, {}, 0, rows - 1, 0, false, {}});
    d.val = var({base + ".val", VarKind::Enum, r.vals, 0, static_cast<Value>(r.vals.size()) - 1, 0,
                 false, {}});
    rec_[r.name] = static_cast<int>(net_.records.size());
    net_.records.push_back(std::move(d));
  }
  for (const auto& r : infos)
    if (flagged_.count(r.name))
      flag_[r.name] = var({"skill[" + r.name + "].interrupt_requested", VarKind::Bool, {}, 0, 1, 0,
                           false, {}});

  if (!check_) {
    for (const auto& b : prog_.basics) {
      const Value tmin = ticks(b.time_interval->min);
      undershoot_[b.name] =
          var({b.name + ".undershoot", VarKind::Bool, {}, 0, 1, tmin > 0 ? 1 : 0, false, {}});
      overshoot_[b.name] = var({b.name + ".overshoot", VarKind::Bool, {}, 0, 1, 0, false, {}});
    }
  }
  for (const auto& c : prog_.composites) {
    if (!c.time_interval) continue;
    const std::string w = c.name + "_watchdog";
    undershoot_[w] = var({w + ".undershoot", VarKind::Bool, {}, 0, 1, 0, false, {}});
    overshoot_[w] = var({w + ".overshoot", VarKind::Bool, {}, 0, 1, 0, false, {}});
  }
  if (!check_) {
    for (const auto& b : prog_.basics) {
      std::vector<std::string> slot{"pending"};
      for (const auto& o : b.successes) slot.push_back(o.tag);
      for (const auto& o : b.failures) slot.push_back(o.tag);
      slot.push_back("interrupted");
      slot.push_back("illegal");
      const int t = var({"task[" + b.name + "]", VarKind::Enum, slot, 0,
                         static_cast<Value>(slot.size()) - 1, 0, true, {}});
      task_[b.name] = t;
      net_.records[rec_.at(b.name)].task = t;
    }
    std::vector<std::string> evs{"none"};
    for (const auto& e : prog_.events) evs.push_back(e.name);
    ev_pending_ = var({"proskill_event", VarKind::Enum, evs, 0, static_cast<Value>(evs.size()) - 1,
                       0, true, {}});
    std::vector<std::string> its{"none"};
    for (const auto& b : host_interrupts_) its.push_back(b);
    for (const auto& c : prog_.composites) its.push_back(c.name);
    intr_pending_ = var({"proskill_interrupt", VarKind::Enum, its, 0,
                         static_cast<Value>(its.size()) - 1, 0, true, {}});
  } else if (opts_.env.max_occurrences > 0) {
    std::map<std::string, int> counters;
    auto counter = [&](const std::string& key) {
      auto [it, fresh] = counters.try_emplace(key, -1);
      if (fresh)
        it->second = var({"environment.count[" + key + "]", VarKind::Nat, {}, 0,
                          opts_.env.max_occurrences, 0, false, {}});
      return it->second;
    };
    for (const auto& e : offered_events_) {
      auto& cs = count_var_[e];
      if (opts_.env.count_scope == CountScope::Event) {
        cs.push_back(counter(e));
        continue;
      }
      for (const auto& a : prog_.find_event(e)->effects) {
        const int c = counter(a.sv);
        if (std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
      }
    }
  }

  // ROOT activates the entry skill and every monitor.
  for (const auto& c : prog_.composites)
    if (c.monitor || (prog_.entry && *prog_.entry == c.name))
      net_.vars[rec(c.name).caller].init = ir::kCallerRoot;
}

void Translator::declare_processes() {
  auto add = [&](const std::string& name, const std::string& cat, const std::string& skill) {
    ir::ProcessDef p;
    p.name = name;
    p.category = cat;
    p.skill = skill;
    proc_[name] = static_cast<int>(net_.processes.size());
    net_.processes.push_back(std::move(p));
  };
  for (const auto& sv : prog_.state_vars)
    if (sv.enumerated) {
      add("sv_" + sv.name, "sv", "");
      sv_proc_[sv.name] = proc_.at("sv_" + sv.name);
    }
  for (const auto& e : prog_.events) add("event_" + e.name, "event", "");
  for (const auto& b : prog_.basics) {
    add("skill_" + b.name, "basic", b.name);
    net_.records[rec_.at(b.name)].process = proc_.at("skill_" + b.name);
  }
  for (const auto& c : prog_.composites) {
    add("skill_" + c.name, c.monitor ? "monitor" : "composite", c.name);
    net_.records[rec_.at(c.name)].process = proc_.at("skill_" + c.name);
    for (const auto& bp : branches_)
      if (bp.owner == c.name) {
        add(bp.process, "branch", c.name);
        net_.records[rec_.at(bp.record)].process = proc_.at(bp.process);
      }
    if (c.time_interval) add("skill_" + c.name + "_watchdog", "watchdog", c.name);
  }
  const bool env = check_ ? (!offered_events_.empty() || !host_interrupts_.empty())
                          : (!prog_.events.empty() || !host_interrupts_.empty() ||
                             !prog_.composites.empty());
  if (env) add("environment", "environment", "");
}

Value Translator::sv_value(const std::string& sv, const std::string& v) const {
  auto parsed = net_.vars[sv_var_.at(sv)].parse(v);
  if (!parsed) throw std::logic_error("value " + v + " outside the domain of " + sv);
  return *parsed;
}

Expr Translator::cond(const ast::Condition& c) const {
  Expr e = Expr::eq(sv_var_.at(c.sv), sv_value(c.sv, c.value));
  return c.negated ? Expr::negate(std::move(e)) : e;
}

Expr Translator::cond_after(const ast::Condition& c, const std::vector<ast::Assign>& effects) const {
  for (const auto& a : effects)
    if (a.sv == c.sv) {
      const bool holds = sv_value(a.sv, a.value) == sv_value(c.sv, c.value);
      return holds != c.negated ? Expr::t() : Expr::f();
    }
  return cond(c);
}

Expr Translator::precondition(const std::vector<ast::TaggedCondition>& pre) const {
  std::vector<Expr> es;
  for (const auto& tc : pre) es.push_back(cond(tc.cond));
  return Expr::conj(std::move(es));
}

Expr Translator::postcondition(const ast::Outcome& o) const {
  std::vector<Expr> es;
  for (const auto& c : o.postcondition) es.push_back(cond_after(c, o.effects));
  return Expr::conj(std::move(es));
}

Expr Translator::quiescent() const {
  std::vector<Expr> es;
  for (const auto& b : prog_.basics) {
    if (b.invariants.empty()) continue;
    std::vector<Expr> gs;
    for (const auto& inv : b.invariants) gs.push_back(cond(inv.guard));
    es.push_back(Expr::disj({Expr::eq(rec(b.name).inv_active, 0), Expr::conj(std::move(gs))}));
  }
  return Expr::conj(std::move(es));
}

void Translator::assign(std::vector<Action>& out, const std::vector<ast::Assign>& effects) const {
  for (const auto& a : effects) out.push_back({sv_var_.at(a.sv), sv_value(a.sv, a.value), -1});
}

Value Translator::val_of(const std::string& skill, const std::string& v) const {
  auto parsed = net_.vars[rec(skill).val].parse(v);
  if (!parsed) throw std::logic_error("value " + v + " is not an outcome of " + skill);
  return *parsed;
}

// Guard for the branch taken when the test is true (positive) or false. In
// CHECK networks a `res` field is not modelled precisely, so either branch
// may be taken whatever the result.
Expr Translator::test(const ast::Test& t, bool positive) const {
  using K = ast::Test::Kind;
  auto exact = [&](Expr e) { return positive ? e : Expr::negate(std::move(e)); };
  switch (t.kind) {
    case K::True: return positive ? Expr::t() : Expr::f();
    case K::False: return positive ? Expr::f() : Expr::t();
    case K::SvEq: return exact(Expr::eq(sv_var_.at(t.name), sv_value(t.name, t.value)));
    case K::SkillField:
      if (t.field == "status") {
        auto it = std::find(ir::kStatusLabels.begin(), ir::kStatusLabels.end(), t.value);
        return exact(Expr::eq(rec(t.name).status,
                              static_cast<Value>(it - ir::kStatusLabels.begin())));
      }
      if (check_) return Expr::t();
      return exact(Expr::eq(rec(t.name).val, val_of(t.name, t.value)));
    case K::Not: return test(t.args.front(), !positive);
    case K::And:
    case K::Or: {
      std::vector<Expr> es;
      for (const auto& a : t.args) es.push_back(test(a, positive));
      return (t.kind == K::And) == positive ? Expr::conj(std::move(es)) : Expr::disj(std::move(es));
    }
  }
  return Expr::t();
}

void Translator::lower_state_variable(const ast::StateVarDef& sv) {
  if (!sv.enumerated) return;
  ProcBuilder b{&net_.processes[sv_proc_.at(sv.name)]};
  for (const auto& v : sv.values) b.state(v);
  const int error = b.state("error", Marker::ErrorState, "forbidden transition");
  b.p->initial = sv_value(sv.name, sv.init);
  const int x = sv_var_.at(sv.name);
  auto allowed = [&](const std::string& from, const std::string& to) {
    if (sv.all_transitions) return true;
    return std::find(sv.transitions.begin(), sv.transitions.end(), std::make_pair(from, to)) !=
           sv.transitions.end();
  };
  for (std::size_t i = 0; i < sv.values.size(); ++i)
    for (std::size_t j = 0; j < sv.values.size(); ++j) {
      if (i == j) continue;
      const bool ok = allowed(sv.values[i], sv.values[j]);
      Transition& t = b.add(static_cast<int>(i), ok ? static_cast<int>(j) : error,
                            Expr::eq(x, static_cast<Value>(j)));
      if (!ok) {
        t.name = sv.values[i] + "_to_" + sv.values[j] + "_forbidden";
        t.marker = Marker::ErrorState;
        t.log = "illegal transition of " + sv.name + " from " + sv.values[i] + " to " +
                sv.values[j];
      }
    }
}

void Translator::lower_event(const ast::EventDef& ev) {
  ProcBuilder b{&net_.processes[proc_.at("event_" + ev.name)]};
  const int s = b.state("start_");
  if (std::find(offered_events_.begin(), offered_events_.end(), ev.name) == offered_events_.end())
    return;
  Transition& t = b.add_named(ev.name, s, s, Expr::t(), 0, ir::kInf);
  t.port = port(ev.name, "event:" + ev.name);
  assign(t.actions, ev.effects);
  t.label = "event:" + ev.name;
}

void Translator::lower_basic_check(const ast::BasicSkillDef& sk) {
  ProcBuilder b{&net_.processes[proc_.at("skill_" + sk.name)]};
  const auto& r = rec(sk.name);
  const int idle = b.state("idle");
  const int run = b.state("run");
  const Expr active = Expr::ne(r.caller, ir::kCallerNone);
  const Expr pre = precondition(sk.precondition);
  const Expr gate = quiescent();

  Transition& start = b.add_named("start", idle, run, Expr::conj({active, gate, pre}));
  assign(start.actions, sk.start);
  start.actions.push_back({r.inv_active, 1, -1});
  start.actions.push_back({r.status, ir::kNoStatus, -1});
  start.label = sk.name + ":start";

  Transition& fail = b.add_named("precondition_failed", idle, idle,
                                 Expr::conj({active, gate, Expr::negate(pre)}));
  fail.actions = {{r.status, ir::kNoStatus, -1}, {r.caller, ir::kCallerNone, -1}};
  fail.label = sk.name + ":precondition_failed";

  auto finish = [&](Transition& t, Value status, Value val) {
    t.actions.push_back({r.val, val, -1});
    t.actions.push_back({r.status, status, -1});
    t.actions.push_back({r.inv_active, 0, -1});
    t.actions.push_back({r.caller, ir::kCallerNone, -1});
  };
  const Value lo = ticks(sk.time_interval->min), hi = ticks(sk.time_interval->max);
  auto outcome = [&](const ast::Outcome& o, const std::string& kind, Value status) {
    const Expr post = postcondition(o);
    const std::string name = kind + "_" + o.tag;
    Transition& t = b.add_named(name, run, idle, post, lo, hi);
    assign(t.actions, o.effects);
    finish(t, status, val_of(sk.name, o.tag));
    const std::string label = sk.name + ":" + kind + ":" + o.tag;
    t.label = label;
    if (post.is_true()) return;
    Transition& w = b.add_named(name + "_postcondition_failed", run, idle, Expr::negate(post), lo, hi);
    assign(w.actions, o.effects);
    finish(w, status, val_of(sk.name, o.tag));
    w.label = label;
    w.marker = Marker::PostconditionWarn;
    w.log = "WARNING: postcondition of " + kind + " " + o.tag + " of skill '" + sk.name +
            "' violated";
  };
  for (const auto& o : sk.successes) outcome(o, "success", ir::kSuccess);
  for (const auto& o : sk.failures) outcome(o, "failure", ir::kFailure);

  if (sk.interrupt &&
      std::find(host_interrupts_.begin(), host_interrupts_.end(), sk.name) != host_interrupts_.end()) {
    Transition& t = b.add_named("interrupt", run, idle, Expr::t(), 0, ir::kInf);
    t.port = port("interrupt_" + sk.name);
    assign(t.actions, sk.interrupt->effects);
    finish(t, ir::kInterrupted, val_of(sk.name, "interrupted"));
    t.label = sk.name + ":interrupted";
  }
  for (const auto& inv : sk.invariants) {
    Transition& t = b.add_named("failed_invariant_" + inv.tag, run, idle, Expr::negate(cond(inv.guard)));
    assign(t.actions, inv.effects);
    finish(t, ir::kFailedInv, val_of(sk.name, "failed_inv_" + inv.tag));
    t.label = sk.name + ":failed_inv:" + inv.tag;
  }
}

void Translator::add_site_ports(const ast::BasicSkillDef& sk) {
  auto it = site_ports_.find(sk.name);
  if (it == site_ports_.end()) return;
  ProcBuilder b{&net_.processes[proc_.at("skill_" + sk.name)]};
  for (const auto& t : b.p->transitions) b.names.insert(t.name);
  const auto& r = rec(sk.name);
  const int run = b.p->state_index("run"), idle = b.p->state_index("idle");
  for (int pt : it->second) {
    Transition& t = b.add_named(net_.ports[pt].name, run, idle, Expr::t(), 0, ir::kInf);
    t.port = pt;
    assign(t.actions, sk.interrupt->effects);
    t.actions.push_back({r.val, val_of(sk.name, "interrupted"), -1});
    t.actions.push_back({r.status, ir::kInterrupted, -1});
    t.actions.push_back({r.inv_active, 0, -1});
    t.actions.push_back({r.caller, ir::kCallerNone, -1});
    t.label = sk.name + ":interrupted";
  }
}

void Translator::lower_basic_run(const ast::BasicSkillDef& sk) {
  ProcBuilder b{&net_.processes[proc_.at("skill_" + sk.name)]};
  const auto& r = rec(sk.name);
  const int ri = rec_.at(sk.name);
  const int task = task_.at(sk.name);
  const int under = undershoot_.at(sk.name), over = overshoot_.at(sk.name);
  const VarDecl& slot = net_.vars[task];
  const Value tmin = ticks(sk.time_interval->min), tmax = ticks(sk.time_interval->max);

  const int start = b.state("start_");
  const int check = b.state("check_precondition");
  const int sat = b.state("precondition_satisfied");
  const int unsat = b.state("precondition_unsatisfied");
  const int action = b.state("action");
  const int sync = b.state("action_sync", Marker::None, "wait_task");
  const int dispatch = b.state("action_dispatch");
  const int error = b.state("error", Marker::ErrorState, "illegal returned value");
  const int s_over = b.state("action_sync_overshoot", Marker::OvershootWarn);
  const int s_notunder = b.state("action_sync_not_undershoot");
  const int interrupted = b.state("interrupted");
  const int failed_inv = b.state("failed_invariant");
  struct Out {
    const ast::Outcome* o;
    std::string kind;
    Value status;
    int entry, check, failed;
  };
  std::vector<Out> outs;
  auto declare = [&](const ast::Outcome& o, const std::string& kind, Value status) {
    Out x{&o, kind, status, 0, 0, 0};
    x.entry = b.state(kind + "_" + o.tag);
    x.check = b.state("check_" + kind + "_postcondition_" + o.tag);
    x.failed = b.state("failed_" + kind + "_postcondition_" + o.tag, Marker::PostconditionWarn);
    outs.push_back(x);
  };
  for (const auto& o : sk.successes) declare(o, "success", ir::kSuccess);
  for (const auto& o : sk.failures) declare(o, "failure", ir::kFailure);
  const int done = b.state("done");
  const int ether = b.state("ether");

  const Expr pre = precondition(sk.precondition);
  const Expr gate = quiescent();
  b.add(start, check, Expr::ne(r.caller, ir::kCallerNone)).actions = {{r.status, ir::kNoStatus, -1}};
  b.add(check, sat, Expr::conj({gate, pre}));
  b.add(check, unsat, Expr::conj({gate, Expr::negate(pre)}));
  Transition& pf = b.add(unsat, done);
  pf.label = sk.name + ":precondition_failed";
  pf.log = "Skill '" + sk.name + "' precondition failed";
  Transition& st = b.add(sat, action);
  assign(st.actions, sk.start);
  st.actions.push_back({r.inv_active, 1, -1});
  st.label = sk.name + ":start";
  Transition& call = b.add(action, sync);
  call.actions = {{under, tmin > 0 ? 1 : 0, -1}, {over, 0, -1}, {task, *slot.parse("pending"), -1}};
  call.calls = {{HostCall::Kind::Start, ri}};
  call.log = "Skill '" + sk.name + "' calling its action " + sk.action;

  // A completion exactly at a bound is in range: the undershoot window flips
  // before it, and overshoot needs the task still pending one tick past tmax.
  const Expr completed = Expr::ne(task, *slot.parse("pending"));
  if (tmin > 0) {
    b.add(sync, s_notunder, Expr::eq(under, 1), tmin, tmin);
    b.add(s_notunder, sync).actions = {{under, 0, -1}};
  }
  b.add(sync, dispatch, Expr::conj({completed, Expr::eq(under, 0)}));
  Expr early_done = completed;
  if (sk.interrupt) {
    const Expr stopped = Expr::eq(task, *slot.parse("interrupted"));
    b.add(sync, dispatch, Expr::conj({stopped, Expr::eq(under, 1)}));
    early_done = Expr::conj({completed, Expr::negate(stopped)});
  }
  Transition& early = b.add(sync, dispatch, Expr::conj({early_done, Expr::eq(under, 1)}));
  early.marker = Marker::UndershootWarn;
  early.log = "WARNING: Action '" + sk.name + "' undershoot";
  const Expr running = Expr::negate(completed);
  Transition& late = b.add(sync, s_over,
                           Expr::conj({running, Expr::eq(under, 0), Expr::eq(over, 0)}),
                           tmax - tmin + 1, tmax - tmin + 1);
  late.marker = Marker::OvershootWarn;
  late.log = "WARNING: Action '" + sk.name + "' overshoot";
  b.add(s_over, sync).actions = {{over, 1, -1}};

  for (const auto& inv : sk.invariants) {
    Transition& t = b.add_named("failed_invariant_" + inv.tag, sync, failed_inv,
                                Expr::negate(cond(inv.guard)));
    assign(t.actions, inv.effects);
    t.actions.push_back({r.val, val_of(sk.name, "failed_inv_" + inv.tag), -1});
    t.calls = {{HostCall::Kind::Cancel, ri}};
    t.label = sk.name + ":failed_inv:" + inv.tag;
  }
  if (sk.interrupt) {
    Transition& t = b.add_named("interrupt", sync, interrupted, Expr::t(), 0, ir::kInf);
    t.port = port("interrupt_" + sk.name);
    assign(t.actions, sk.interrupt->effects);
    t.calls = {{HostCall::Kind::Interrupt, ri}};
    t.label = sk.name + ":interrupted";
    Transition& d = b.add(dispatch, interrupted, Expr::eq(task, *slot.parse("interrupted")));
    assign(d.actions, sk.interrupt->effects);
    d.label = sk.name + ":interrupted";
  }
  for (const auto& x : outs) {
    Transition& d = b.add(dispatch, x.entry, Expr::eq(task, *slot.parse(x.o->tag)));
    d.label = sk.name + ":" + x.kind + ":" + x.o->tag;
    Transition& e = b.add(x.entry, x.check);
    e.actions = {{r.val, val_of(sk.name, x.o->tag), -1}, {r.inv_active, 0, -1}};
    assign(e.actions, x.o->effects);
    const Expr post = postcondition(*x.o);
    b.add(x.check, done, post).actions = {{r.status, x.status, -1}};
    Transition& w = b.add(x.check, x.failed, Expr::negate(post));
    w.log = "WARNING: postcondition of " + x.kind + " " + x.o->tag + " of skill '" + sk.name +
            "' violated";
    w.marker = Marker::PostconditionWarn;
    b.add(x.failed, done).actions = {{r.status, x.status, -1}};
  }
  // Any other returned value, including tags of an interrupt the skill does not declare.
  std::vector<Expr> legal;
  for (const auto& x : outs) legal.push_back(Expr::eq(task, *slot.parse(x.o->tag)));
  if (sk.interrupt) legal.push_back(Expr::eq(task, *slot.parse("interrupted")));
  Transition& bad = b.add(dispatch, error, Expr::negate(Expr::disj(std::move(legal))));
  bad.marker = Marker::ErrorState;
  bad.log = "Action '" + sk.name + "' returned an illegal value";
  b.add(interrupted, done).actions = {{r.inv_active, 0, -1},
                                      {r.status, ir::kInterrupted, -1},
                                      {r.val, val_of(sk.name, "interrupted"), -1}};
  b.add(failed_inv, done).actions = {{r.inv_active, 0, -1}, {r.status, ir::kFailedInv, -1}};
  b.add(error, ether).actions = {{r.inv_active, 0, -1}};
  b.add(done, ether);
  b.add(ether, start).actions = {{r.caller, ir::kCallerNone, -1}};
}

int Translator::site_port(const std::string& target, int site_proc) {
  auto key = std::make_pair(target, site_proc);
  if (auto it = site_port_of_.find(key); it != site_port_of_.end()) return it->second;
  const int p = port("interrupt_" + target + "_from_" + net_.processes[site_proc].name);
  site_port_of_[key] = p;
  site_ports_[target].push_back(p);
  return p;
}

int Translator::label_state(BodyCtx& ctx, const std::string& name) {
  auto it = ctx.labels.find(name);
  if (it != ctx.labels.end()) return it->second;
  const int s = ctx.b->state("label_" + name);
  ctx.labels[name] = s;
  return s;
}

void Translator::compile_seq(BodyCtx& ctx, const std::vector<ast::Instruction>& seq, int entry,
                             int exit) {
  using K = ast::Instruction::Kind;
  ProcBuilder& b = *ctx.b;
  int cur = entry;
  bool dead = false;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& ins = seq[i];
    const bool last = i + 1 == seq.size();
    switch (ins.kind) {
      case K::Printf: {
        if (dead) break;
        auto& log = b.pending_log[cur];
        log += log.empty() ? ins.name : "\n" + ins.name;
        break;
      }
      case K::Label: {
        const int l = label_state(ctx, ins.name);
        if (!dead) b.add(cur, l);
        cur = l;
        dead = false;
        break;
      }
      case K::Goto:
        if (!dead) b.add(cur, label_state(ctx, ins.name));
        cur = b.fresh_state();
        dead = true;
        break;
      case K::Success:
      case K::Failure: {
        const std::string key = (ins.kind == K::Success ? "success_" : "failure_") + ins.name;
        if (!dead) b.add(cur, ctx.outcomes.at(key));
        cur = b.fresh_state();
        dead = true;
        break;
      }
      default: {
        const int nxt = last ? exit : b.fresh_state();
        compile_instr(ctx, ins, cur, nxt);
        cur = nxt;
        dead = false;
      }
    }
  }
  if (cur != exit && !dead) b.add(cur, exit);
}

void Translator::compile_instr(BodyCtx& ctx, const ast::Instruction& ins, int cur, int nxt) {
  using K = ast::Instruction::Kind;
  ProcBuilder& b = *ctx.b;
  const std::string cur_name = b.p->states[cur].name;
  switch (ins.kind) {
    case K::Call: {
      const auto& callee = rec(ins.name);
      const int sync =
          b.state(cur_name + "_" + b.p->states[nxt].name + "_sync", Marker::None, "call " + ins.name);
      Transition& t = b.add(cur, sync, Expr::eq(callee.caller, ir::kCallerNone));
      t.actions = {{callee.caller, caller_id(ctx.self_rec), -1}};
      auto row = arg_row_.find(&ins);
      t.actions.push_back({callee.arg_index, row == arg_row_.end() ? 0 : row->second, -1});
      b.add(sync, nxt, Expr::eq(callee.caller, ir::kCallerNone));
      ctx.stable.push_back({Stable::Kind::Call, sync, ins.name, {}});
      break;
    }
    case K::WaitCond:
      b.p->states[cur].note = "wait_cond";
      b.add(cur, nxt, test(ins.test, true));
      ctx.stable.push_back({Stable::Kind::Wait, cur, {}, {}});
      break;
    case K::WaitTime: {
      const Value d = ticks(ins.seconds);
      b.p->states[cur].note = "wait_time";
      b.add(cur, nxt, Expr::t(), d, d);
      ctx.stable.push_back({Stable::Kind::Wait, cur, {}, {}});
      break;
    }
    case K::If: {
      const int then_s = b.state(cur_name + "_T");
      b.add(cur, then_s, test(ins.test, true));
      int else_s = nxt;
      if (!ins.else_body.empty()) else_s = b.state(cur_name + "_F");
      b.add(cur, else_s, test(ins.test, false));
      compile_seq(ctx, ins.body, then_s, nxt);
      if (!ins.else_body.empty()) compile_seq(ctx, ins.else_body, else_s, nxt);
      break;
    }
    case K::While: {
      const int body_s = b.state(cur_name + "_T");
      b.add(cur, body_s, test(ins.test, true));
      b.add(cur, nxt, test(ins.test, false));
      compile_seq(ctx, ins.body, body_s, cur);
      break;
    }
    case K::DoUntil: {
      const int test_s = b.state(cur_name + "_until");
      compile_seq(ctx, ins.body, cur, test_s);
      b.add(test_s, nxt, test(ins.test, true));
      b.add(test_s, cur, test(ins.test, false));
      break;
    }
    case K::Parallel: {
      const int sync = b.state(cur_name + "_" + b.p->states[nxt].name + "_sync", Marker::None,
                               "parallel");
      Transition& t = b.add(cur, sync);
      std::vector<Expr> joined;
      std::vector<int> recs;
      for (int bi : par_branches_.at(&ins)) {
        const int r = rec_.at(branches_[bi].record);
        recs.push_back(r);
        t.actions.push_back({net_.records[r].caller, caller_id(ctx.self_rec), -1});
        joined.push_back(Expr::eq(net_.records[r].caller, ir::kCallerNone));
      }
      b.add(sync, nxt, Expr::conj(std::move(joined)));
      ctx.stable.push_back({Stable::Kind::Par, sync, {}, recs});
      break;
    }
    case K::Interrupt: {
      const auto& target = rec(ins.name);
      const Expr idle = Expr::eq(target.caller, ir::kCallerNone);
      if (prog_.find_composite(ins.name)) {
        Transition& t = b.add(cur, nxt, Expr::negate(idle));
        t.actions = {{flag_.at(ins.name), 1, -1}};
        b.add(cur, nxt, idle).log = "interrupt of idle skill '" + ins.name + "' ignored";
      } else if (check_) {
        b.add(cur, nxt, Expr::t()).port = site_port(ins.name, ctx.proc);
        b.add(cur, nxt, idle).log = "interrupt of idle skill '" + ins.name + "' ignored";
      } else {
        const Expr running = Expr::at(target.process,
                                      net_.processes[target.process].state_index("action_sync"));
        Transition& t = b.add(cur, nxt, running);
        t.calls = {{HostCall::Kind::Interrupt, rec_.at(ins.name)}};
        t.log = "interrupting skill '" + ins.name + "'";
        b.add(cur, nxt, Expr::negate(running)).log =
            "interrupt of idle skill '" + ins.name + "' ignored";
      }
      ctx.stable.push_back({Stable::Kind::Wait, cur, {}, {}});
      break;
    }
    default: throw std::logic_error("unexpected instruction " + ast::to_string(ins.kind));
  }
}

// Pending interrupt requests abort the body from every waiting state: the
// running callees are interrupted first, then the process leaves through exit.
void Translator::add_abort(BodyCtx& ctx, int exit) {
  const std::string self = net_.records[ctx.self_rec].name;
  auto fit = flag_.find(self);
  if (fit == flag_.end()) return;
  ProcBuilder& b = *ctx.b;
  const Expr requested = Expr::eq(fit->second, 1);
  for (const auto& st : ctx.stable) {
    const std::string sname = b.p->states[st.state].name;
    switch (st.kind) {
      case Stable::Kind::Wait: b.add(st.state, exit, requested); break;
      case Stable::Kind::Call: {
        const auto& callee = rec(st.callee);
        const Expr idle = Expr::eq(callee.caller, ir::kCallerNone);
        const int wait = b.state("abort_" + sname);
        b.add(wait, exit, idle);
        b.add(st.state, exit, Expr::conj({requested, idle}));
        if (prog_.find_composite(st.callee)) {
          b.add(st.state, wait, Expr::conj({requested, Expr::negate(idle)})).actions = {
              {flag_.at(st.callee), 1, -1}};
        } else if (!callee.interruptible) {
          b.add(st.state, wait, Expr::conj({requested, Expr::negate(idle)}));
        } else if (check_) {
          b.add(st.state, wait, requested).port = site_port(st.callee, ctx.proc);
        } else {
          Transition& t = b.add(st.state, wait,
                                Expr::conj({requested, Expr::at(callee.process,
                                                                net_.processes[callee.process]
                                                                    .state_index("action_sync"))}));
          t.calls = {{HostCall::Kind::Interrupt, rec_.at(st.callee)}};
        }
        break;
      }
      case Stable::Kind::Par: {
        int cur = b.state("abort_" + sname);
        b.add(st.state, cur, requested);
        for (int r : st.branches) {
          const int nxt = b.state("abort_" + sname);
          const auto& br = net_.records[r];
          const Expr idle = Expr::eq(br.caller, ir::kCallerNone);
          b.add(cur, nxt, Expr::negate(idle)).actions = {{flag_.at(br.name), 1, -1}};
          b.add(cur, nxt, idle);
          cur = nxt;
        }
        std::vector<Expr> joined;
        for (int r : st.branches) joined.push_back(Expr::eq(net_.records[r].caller, ir::kCallerNone));
        b.add(cur, exit, Expr::conj(std::move(joined)));
        break;
      }
    }
  }
}

void Translator::lower_composite(const ast::CompositeSkillDef& sk) {
  const int proc = proc_.at("skill_" + sk.name);
  ProcBuilder b{&net_.processes[proc]};
  const int ri = rec_.at(sk.name);
  const auto& r = net_.records[ri];

  const int start = b.state("start_");
  const int check = b.state("check_precondition");
  const int sat = b.state("precondition_satisfied");
  const int unsat = b.state("precondition_unsatisfied");
  const int body = b.state("body_branch");
  const int end = b.state("end_of_body");
  BodyCtx ctx{&b, proc, ri, &sk, false, {}, {}, {}};
  std::vector<std::pair<const ast::Outcome*, Value>> outs;
  for (const auto& o : sk.successes) {
    ctx.outcomes["success_" + o.tag] = b.state("success_" + o.tag);
    outs.push_back({&o, ir::kSuccess});
  }
  for (const auto& o : sk.failures) {
    ctx.outcomes["failure_" + o.tag] = b.state("failure_" + o.tag);
    outs.push_back({&o, ir::kFailure});
  }
  const bool flagged = flag_.count(sk.name) > 0;
  const int interrupted = flagged ? b.state("interrupted") : -1;
  const int done = b.state("done");
  const int ether = b.state("ether");

  b.add(start, check, Expr::ne(r.caller, ir::kCallerNone)).actions = {{r.status, ir::kNoStatus, -1}};
  b.add(check, sat, Expr::conj({quiescent(), precondition(sk.precondition)}));
  b.add(check, unsat, Expr::conj({quiescent(), Expr::negate(precondition(sk.precondition))}))
      .log = "Skill '" + sk.name + "' precondition failed";
  b.add(unsat, done);
  assign(b.add(sat, body).actions, sk.start);

  const int first = b.fresh_state();
  b.add(body, first);
  compile_seq(ctx, sk.body, first, end);

  b.add(end, done).actions = {{r.val, val_of(sk.name, "none"), -1}, {r.status, ir::kSuccess, -1}};
  for (const auto& [o, status] : outs) {
    const std::string kind = status == ir::kSuccess ? "success" : "failure";
    const int s = ctx.outcomes.at(kind + "_" + o->tag);
    const Expr post = postcondition(*o);
    std::vector<Action> acts{{r.val, val_of(sk.name, o->tag), -1}};
    assign(acts, o->effects);
    acts.push_back({r.status, status, -1});
    b.add(s, done, post).actions = acts;
    if (!post.is_true()) {
      Transition& w = b.add(s, done, Expr::negate(post));
      w.actions = acts;
      w.marker = Marker::PostconditionWarn;
      w.log = "WARNING: postcondition of " + kind + " " + o->tag + " of skill '" + sk.name +
              "' violated";
    }
  }
  if (flagged) {
    add_abort(ctx, interrupted);
    Transition& t = b.add(interrupted, done);
    if (sk.interrupt) assign(t.actions, sk.interrupt->effects);
    t.actions.push_back({r.val, val_of(sk.name, "interrupted"), -1});
    t.actions.push_back({r.status, ir::kInterrupted, -1});
    t.log = "Skill '" + sk.name + "' interrupted";
    b.add(done, ether).actions = {{flag_.at(sk.name), 0, -1}};
  } else {
    b.add(done, ether);
  }
  b.add(ether, start).actions = {{r.caller, ir::kCallerNone, -1}};

  for (const auto& bp : branches_)
    if (bp.owner == sk.name) lower_branch(bp);
  if (sk.time_interval) lower_watchdog(sk);
}

void Translator::lower_branch(const BranchPlan& bp) {
  const int proc = proc_.at(bp.process);
  ProcBuilder b{&net_.processes[proc]};
  const int ri = rec_.at(bp.record);
  const auto& r = net_.records[ri];
  const int start = b.state("start_");
  const int body = b.state("body_branch");
  const int done = b.state("done");
  const int ether = b.state("ether");
  BodyCtx ctx{&b, proc, ri, prog_.find_composite(bp.owner), true, {}, {}, {}};
  b.add(start, body, Expr::ne(r.caller, ir::kCallerNone));
  compile_seq(ctx, *bp.body, body, done);
  if (flag_.count(bp.record)) {
    add_abort(ctx, done);
    b.add(done, ether).actions = {{flag_.at(bp.record), 0, -1}};
  } else {
    b.add(done, ether);
  }
  b.add(ether, start).actions = {{r.caller, ir::kCallerNone, -1}};
}

void Translator::lower_watchdog(const ast::CompositeSkillDef& sk) {
  const std::string w = sk.name + "_watchdog";
  ProcBuilder b{&net_.processes[proc_.at("skill_" + w)]};
  const auto& r = rec(sk.name);
  const int under = undershoot_.at(w), over = overshoot_.at(w);
  const Value tmin = ticks(sk.time_interval->min), tmax = ticks(sk.time_interval->max);
  const int start = b.state("start_");
  const int monitor = b.state("monitor");
  const int s_over = b.state("skill_overshoot", Marker::OvershootWarn);
  const int s_notunder = b.state("skill_not_undershoot");
  const int s_under = b.state("skill_undershoot", Marker::UndershootWarn);
  // Past the overshoot nothing is timed; a separate location keeps the clock from ticking.
  const int overshot = b.state("overshot");
  const Expr idle = Expr::eq(r.caller, ir::kCallerNone);

  b.add(start, monitor, Expr::negate(idle)).actions = {{under, tmin > 0 ? 1 : 0, -1}, {over, 0, -1}};
  b.add(monitor, start, Expr::conj({idle, Expr::eq(under, 0)}));
  Transition& early = b.add(monitor, s_under, Expr::conj({idle, Expr::eq(under, 1)}));
  early.marker = Marker::UndershootWarn;
  early.log = "WARNING: Skill '" + sk.name + "' undershoot";
  b.add(s_under, start);
  if (tmin > 0) {
    b.add(monitor, s_notunder, Expr::eq(under, 1), tmin, tmin);
    b.add(s_notunder, monitor).actions = {{under, 0, -1}};
  }
  Transition& late = b.add(monitor, s_over, Expr::conj({Expr::eq(under, 0), Expr::eq(over, 0)}),
                           tmax - tmin, tmax - tmin);
  late.marker = Marker::OvershootWarn;
  late.log = "WARNING: Skill '" + sk.name + "' overshoot";
  b.add(s_over, overshot).actions = {{over, 1, -1}};
  b.add(overshot, start, idle);
}

void Translator::synth_environment() {
  auto it = proc_.find("environment");
  if (it == proc_.end()) return;
  ProcBuilder b{&net_.processes[it->second]};
  const int s = b.state("start_");

  if (check_) {
    // Zero-delay internal steps that must run before the environment may act.
    Expr quiet = Expr::t();
    if (opts_.env.quiescent) {
      std::vector<Expr> busy;
      for (std::size_t p = 0; p < net_.processes.size(); ++p) {
        if (static_cast<int>(p) == it->second) continue;
        std::map<int, std::vector<Expr>> by_state;
        for (const auto& t : net_.processes[p].transitions)
          if (t.lo == 0 && t.hi == 0 && t.port < 0) by_state[t.from].push_back(t.guard);
        for (auto& [from, gs] : by_state)
          busy.push_back(Expr::conj({Expr::at(static_cast<int>(p), from), Expr::disj(std::move(gs))}));
      }
      quiet = Expr::negate(Expr::disj(std::move(busy)));
    }
    for (const auto& name : offered_events_) {
      const ast::EventDef& ev = *prog_.find_event(name);
      std::vector<Expr> guard;
      if (auto c = count_var_.find(name); c != count_var_.end())
        for (int v : c->second) guard.push_back(Expr::lt(v, opts_.env.max_occurrences));
      if (opts_.env.legal_only) {
        // Each effect keeps its value or follows a declared edge; at least one changes.
        std::vector<Expr> changes;
        for (const auto& a : ev.effects) {
          const ast::StateVarDef& sv = *prog_.find_sv(a.sv);
          const int x = sv_var_.at(sv.name);
          const Value target = sv_value(sv.name, a.value);
          changes.push_back(Expr::ne(x, target));
          if (!sv.enumerated || sv.all_transitions) continue;
          std::vector<Expr> from;
          for (std::size_t u = 0; u < sv.values.size(); ++u) {
            const bool ok = sv.values[u] == a.value ||
                            std::find(sv.transitions.begin(), sv.transitions.end(),
                                      std::make_pair(sv.values[u], a.value)) != sv.transitions.end();
            if (ok)
              from.push_back(Expr::conj({Expr::eq(x, static_cast<Value>(u)),
                                         Expr::at(sv_proc_.at(sv.name), static_cast<int>(u))}));
          }
          guard.push_back(Expr::disj(std::move(from)));
        }
        guard.push_back(Expr::disj(std::move(changes)));
      }
      guard.push_back(quiet);
      Transition& t = b.add_named(name, s, s, Expr::conj(std::move(guard)), 0, ir::kInf);
      t.port = port(name);
      if (auto c = count_var_.find(name); c != count_var_.end())
        for (int v : c->second) t.actions.push_back({v, 1, v});
    }
    for (const auto& k : host_interrupts_)
      b.add_named("interrupt_" + k, s, s, quiet, 0, ir::kInf).port = port("interrupt_" + k);
    return;
  }

  const VarDecl& evs = net_.vars[ev_pending_];
  for (const auto& e : prog_.events) {
    Transition& t = b.add_named(e.name, s, s, Expr::eq(ev_pending_, *evs.parse(e.name)));
    t.port = port(e.name);
    t.actions = {{ev_pending_, 0, -1}};
  }
  const VarDecl& its = net_.vars[intr_pending_];
  for (const auto& k : host_interrupts_) {
    const auto& r = rec(k);
    const Value v = *its.parse(k);
    const Expr running = Expr::at(r.process, net_.processes[r.process].state_index("action_sync"));
    Transition& t = b.add_named("interrupt_" + k, s, s, Expr::eq(intr_pending_, v));
    t.port = port("interrupt_" + k);
    t.actions = {{intr_pending_, 0, -1}};
    Transition& d = b.add_named("drop_interrupt_" + k, s, s,
                                Expr::conj({Expr::eq(intr_pending_, v), Expr::negate(running)}));
    d.actions = {{intr_pending_, 0, -1}};
    d.log = "WARNING: interrupt of idle skill '" + k + "' dropped";
  }
  for (const auto& c : prog_.composites) {
    const auto& r = rec(c.name);
    const Value v = *its.parse(c.name);
    const Expr idle = Expr::eq(r.caller, ir::kCallerNone);
    Transition& t = b.add_named("interrupt_" + c.name, s, s,
                                Expr::conj({Expr::eq(intr_pending_, v), Expr::negate(idle)}));
    t.actions = {{intr_pending_, 0, -1}, {flag_.at(c.name), 1, -1}};
    Transition& d = b.add_named("drop_interrupt_" + c.name, s, s,
                                Expr::conj({Expr::eq(intr_pending_, v), idle}));
    d.actions = {{intr_pending_, 0, -1}};
    d.log = "WARNING: interrupt of idle skill '" + c.name + "' dropped";
  }
}

TranslationUnit Translator::run() {
  net_.mode = to_string(opts_.mode);
  net_.tick_rate = opts_.tick_rate;
  net_.name = prog_.entry ? *prog_.entry : "program";
  plan();
  declare_vars();
  declare_processes();
  for (const auto& sv : prog_.state_vars) lower_state_variable(sv);
  for (const auto& e : prog_.events) lower_event(e);
  for (const auto& b : prog_.basics) check_ ? lower_basic_check(b) : lower_basic_run(b);
  for (const auto& c : prog_.composites) lower_composite(c);
  if (check_)
    for (const auto& b : prog_.basics) add_site_ports(b);
  synth_environment();
  net_.check_well_formed();

  unit_.mode = opts_.mode;
  unit_.entry = prog_.entry.value_or("");
  for (const auto& c : kInventoryCategories) unit_.inventory[c] = 0;
  for (const auto& p : net_.processes) ++unit_.inventory[p.category];
  if (!check_) {
    unit_.bindings.push_back({"proskill_event", "EVENT_PORT", "proskill_event", ""});
    unit_.bindings.push_back({"proskill_interrupt", "INTERRUPT_PORT", "proskill_interrupt", ""});
    for (const auto& b : prog_.basics)
      unit_.bindings.push_back({b.action, "TASK", "task[" + b.name + "]", b.name});
  }
  unit_.network = std::move(net_);
  return std::move(unit_);
}

}  // namespace

TranslationUnit assemble(const ast::SkillProgram& prog, const Options& opts) {
  if (opts.tick_rate <= 0) throw std::invalid_argument("tick rate must be positive");
  return Translator(prog, opts).run();
}

nlohmann::json inventory_json(const TranslationUnit& unit) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : unit.inventory) j[k] = v;
  return j;
}

nlohmann::json bindings_json(const TranslationUnit& unit) {
  nlohmann::json j = nlohmann::json::object();
  nlohmann::json points = nlohmann::json::object();
  for (const auto& b : unit.bindings) {
    nlohmann::json e{{"kind", b.kind}, {"var", b.var}};
    if (!b.skill.empty()) e["skill"] = b.skill;
    points[b.name] = e;
  }
  j["bindings"] = points;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : unit.network.arg_table) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& a : row) r.push_back({{"name", a.name}, {"value", a.value}, {"text", a.text}});
    rows.push_back(r);
  }
  j["arg_table"] = rows;
  return j;
}

}  // namespace proskill::translate
