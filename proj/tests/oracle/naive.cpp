#include "naive.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace oracle {

using proskill::check::Property;
using proskill::ir::Expr;
using proskill::ir::kInf;
using proskill::ir::ProcessNetwork;
using proskill::ir::Transition;

namespace {

// A state is [loc..., clock..., val...].
using State = std::vector<int>;

struct Net {
  const ProcessNetwork& n;
  std::size_t P, V;

  int loc(const State& s, std::size_t p) const { return s[p]; }
  int clk(const State& s, std::size_t p) const { return s[P + p]; }
  int val(const State& s, std::size_t v) const { return s[2 * P + v]; }

  bool holds(const Expr& e, const State& s) const {
    using Op = Expr::Op;
    if (e.op == Op::True) return true;
    if (e.op == Op::False) return false;
    if (e.op == Op::Eq) return val(s, e.a) == e.b;
    if (e.op == Op::Lt) return val(s, e.a) < e.b;
    if (e.op == Op::Le) return val(s, e.a) <= e.b;
    if (e.op == Op::EqVar) return val(s, e.a) == val(s, e.b);
    if (e.op == Op::At) return loc(s, e.a) == e.b;
    if (e.op == Op::Not) return !holds(e.args.at(0), s);
    bool any = false, all = true;
    for (const auto& x : e.args) {
      const bool h = holds(x, s);
      any = any || h;
      all = all && h;
    }
    return e.op == Op::And ? all : any;
  }

  static bool timeless(const Transition& t) { return t.lo == 0 && (t.hi == 0 || t.hi == kInf); }

  // Largest clock value worth distinguishing in state `st` of process p.
  int cap(std::size_t p, int st) const {
    int c = 0;
    for (const auto& t : n.processes[p].transitions) {
      if (t.from != st || timeless(t)) continue;
      c = std::max(c, t.hi == kInf ? t.lo : t.hi + 1);
    }
    return c;
  }

  bool ready(const State& s, std::size_t p, const Transition& t) const {
    if (loc(s, p) != t.from) return false;
    if (!timeless(t) && (clk(s, p) < t.lo || clk(s, p) > t.hi)) return false;
    return holds(t.guard, s);
  }

  using Step = std::vector<std::pair<std::size_t, std::size_t>>;

  std::vector<Step> steps(const State& s) const {
    std::vector<Step> out;
    for (std::size_t p = 0; p < P; ++p) {
      const auto& trs = n.processes[p].transitions;
      for (std::size_t t = 0; t < trs.size(); ++t)
        if (trs[t].port < 0 && ready(s, p, trs[t])) out.push_back({{p, t}});
    }
    for (std::size_t port = 0; port < n.ports.size(); ++port) {
      // Every process mentioning the port must take part with one ready transition.
      std::vector<std::vector<std::pair<std::size_t, std::size_t>>> choices;
      for (std::size_t p = 0; p < P; ++p) {
        const auto& trs = n.processes[p].transitions;
        bool mentions = false;
        std::vector<std::pair<std::size_t, std::size_t>> mine;
        for (std::size_t t = 0; t < trs.size(); ++t) {
          if (trs[t].port != static_cast<int>(port)) continue;
          mentions = true;
          if (ready(s, p, trs[t])) mine.push_back({p, t});
        }
        if (mentions) choices.push_back(mine);
      }
      if (choices.empty()) continue;
      std::vector<Step> combos{{}};
      for (const auto& ch : choices) {
        std::vector<Step> next;
        for (const auto& partial : combos)
          for (const auto& c : ch) {
            Step st = partial;
            st.push_back(c);
            next.push_back(st);
          }
        combos = std::move(next);
      }
      for (auto& c : combos) out.push_back(std::move(c));
    }
    return out;
  }

  State apply(const State& s, const Step& step) const {
    State r = s;
    for (auto [p, t] : step)
      for (const auto& a : n.processes[p].transitions[t].actions) {
        const int v = a.src >= 0 ? r[2 * P + a.src] + a.value : a.value;
        const auto& d = n.vars[a.var];
        if (v < d.min || v > d.max) throw std::runtime_error("range fault on " + d.name);
        r[2 * P + a.var] = v;
      }
    for (auto [p, t] : step) {
      r[p] = n.processes[p].transitions[t].to;
      r[P + p] = 0;
    }
    return r;
  }

  // Time may pass unless some ready transition would leave its window.
  bool may_wait(const State& s, const std::vector<Step>& ready_steps) const {
    for (const auto& st : ready_steps)
      for (auto [p, t] : st) {
        const auto& tr = n.processes[p].transitions[t];
        if (tr.hi == kInf) continue;
        if (tr.hi == 0 && tr.lo == 0) return false;
        if (clk(s, p) >= tr.hi) return false;
      }
    return true;
  }

  State tick(const State& s) const {
    State r = s;
    for (std::size_t p = 0; p < P; ++p) r[P + p] = std::min(clk(s, p) + 1, cap(p, loc(s, p)));
    return r;
  }

  bool stuck(const State& s, const std::vector<Step>& ready_steps) const {
    if (!ready_steps.empty()) return false;
    for (std::size_t p = 0; p < P; ++p)
      if (clk(s, p) != cap(p, loc(s, p))) return false;
    return true;
  }

  State initial() const {
    State s(2 * P + V);
    for (std::size_t p = 0; p < P; ++p) s[p] = n.processes[p].initial;
    for (std::size_t v = 0; v < V; ++v) s[2 * P + v] = n.vars[v].init;
    return s;
  }
};

// Visited states are stored as byte strings, one or two bytes per component.
class Codec {
 public:
  explicit Codec(const Net& net) : P_(net.P) {
    int hi = 0;
    for (std::size_t p = 0; p < net.P; ++p) {
      const auto& proc = net.n.processes[p];
      hi = std::max(hi, static_cast<int>(proc.states.size()));
      for (std::size_t st = 0; st < proc.states.size(); ++st)
        hi = std::max(hi, net.cap(p, static_cast<int>(st)));
    }
    for (const auto& v : net.n.vars) {
      offset_.push_back(v.min);
      hi = std::max(hi, v.max - v.min);
    }
    wide_ = hi > 255;
  }

  std::string encode(const State& s) const {
    std::string k;
    k.reserve(s.size() * (wide_ ? 2 : 1));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int x = i < 2 * P_ ? s[i] : s[i] - offset_[i - 2 * P_];
      k.push_back(static_cast<char>(x & 0xFF));
      if (wide_) k.push_back(static_cast<char>((x >> 8) & 0xFF));
    }
    return k;
  }

  State decode(const std::string& k) const {
    const std::size_t w = wide_ ? 2 : 1;
    State s(k.size() / w);
    for (std::size_t i = 0; i < s.size(); ++i) {
      int x = static_cast<unsigned char>(k[i * w]);
      if (wide_) x |= static_cast<unsigned char>(k[i * w + 1]) << 8;
      s[i] = i < 2 * P_ ? x : x + offset_[i - 2 * P_];
    }
    return s;
  }

 private:
  std::size_t P_;
  std::vector<int> offset_;
  bool wide_ = false;
};

struct Space {
  std::unordered_set<std::string> seen;
  bool complete = true;
  bool any_stuck = false;
};

template <class Visit>
Space explore(const Net& net, std::size_t max_states, Visit visit) {
  Space sp;
  const Codec codec(net);
  std::deque<std::string> todo;
  const std::string k0 = codec.encode(net.initial());
  sp.seen.insert(k0);
  todo.push_back(k0);
  while (!todo.empty()) {
    const State s = codec.decode(todo.front());
    todo.pop_front();
    visit(s);
    const auto ready_steps = net.steps(s);
    if (net.stuck(s, ready_steps)) sp.any_stuck = true;
    std::vector<State> succ;
    for (const auto& st : ready_steps) succ.push_back(net.apply(s, st));
    if (net.may_wait(s, ready_steps)) {
      State w = net.tick(s);
      if (w != s) succ.push_back(std::move(w));
    }
    for (const auto& n : succ) {
      std::string k = codec.encode(n);
      if (sp.seen.count(k)) continue;
      if (sp.seen.size() >= max_states) {
        sp.complete = false;
        continue;
      }
      sp.seen.insert(k);
      todo.push_back(std::move(k));
    }
  }
  return sp;
}

// Bounded response observer: armed when p holds without q, cleared by q,
// violated once k+1 ticks pass while armed.
ProcessNetwork with_observer(const ProcessNetwork& base, const Expr& p, const Expr& q, int k) {
  ProcessNetwork n = base;
  proskill::ir::ProcessDef obs;
  obs.name = "oracle_observer";
  obs.category = "property";
  obs.states = {{"idle", {}, {}}, {"armed", {}, {}}, {"violated", {}, {}}};
  auto tr = [](std::string name, int from, int to, int lo, int hi, Expr g) {
    Transition t;
    t.name = std::move(name);
    t.from = from;
    t.to = to;
    t.lo = lo;
    t.hi = hi;
    t.guard = std::move(g);
    return t;
  };
  obs.transitions.push_back(tr("arm", 0, 1, 0, 0, Expr::conj({p, Expr::negate(q)})));
  obs.transitions.push_back(tr("release", 1, 0, 0, 0, q));
  obs.transitions.push_back(tr("expire", 1, 2, k + 1, k + 1, Expr::negate(q)));
  n.processes.push_back(std::move(obs));
  return n;
}

std::string word(bool known, bool value) {
  if (!known) return "UNKNOWN";
  return value ? "TRUE" : "FALSE";
}

}  // namespace

std::size_t count_states(const ProcessNetwork& net, std::size_t max_states) {
  Net n{net, net.processes.size(), net.vars.size()};
  return explore(n, max_states, [](const State&) {}).seen.size();
}

NaiveResult enumerate(const ProcessNetwork& net, const std::vector<Property>& props,
                      std::size_t max_states) {
  Net n{net, net.processes.size(), net.vars.size()};
  std::vector<bool> seen_p(props.size(), false);
  Space sp = explore(n, max_states, [&](const State& s) {
    for (std::size_t i = 0; i < props.size(); ++i)
      if (!seen_p[i] && (props[i].kind == Property::Kind::Reachable ||
                         props[i].kind == Property::Kind::Absent))
        seen_p[i] = n.holds(props[i].p, s);
  });
  NaiveResult r;
  r.states = sp.seen.size();
  r.complete = sp.complete;
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& pr = props[i];
    switch (pr.kind) {
      case Property::Kind::Reachable:
        r.verdicts.push_back(word(seen_p[i] || sp.complete, seen_p[i]));
        break;
      case Property::Kind::Absent:
        r.verdicts.push_back(word(seen_p[i] || sp.complete, !seen_p[i]));
        break;
      case Property::Kind::DeadlockFree:
        r.verdicts.push_back(word(sp.any_stuck || sp.complete, !sp.any_stuck));
        break;
      case Property::Kind::LeadsToWithin: {
        const ProcessNetwork m = with_observer(net, pr.p, pr.q, pr.ticks);
        Net mn{m, m.processes.size(), m.vars.size()};
        const std::size_t obs = m.processes.size() - 1;
        bool violated = false;
        Space ms = explore(mn, max_states, [&](const State& s) {
          violated = violated || s[obs] == 2;
        });
        r.verdicts.push_back(word(violated || ms.complete, !violated));
        break;
      }
    }
  }
  return r;
}

}  // namespace oracle
