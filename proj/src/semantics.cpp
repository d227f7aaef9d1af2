#include "proskill/semantics.hpp"

#include <algorithm>

namespace proskill::ir {

Semantics::Semantics(const ProcessNetwork& net) : net_(net) {
  net.check_well_formed();
  const std::size_t np = net.processes.size();
  caps_.resize(np);
  max_caps_.assign(np, 0);
  outgoing_.resize(np);
  guard_.resize(np);
  participants_.assign(net.ports.size(), {});
  for (std::size_t p = 0; p < np; ++p) {
    const auto& proc = net.processes[p];
    caps_[p].assign(proc.states.size(), 0);
    outgoing_[p].assign(proc.states.size(), {});
    for (std::size_t t = 0; t < proc.transitions.size(); ++t) {
      const auto& tr = proc.transitions[t];
      outgoing_[p][tr.from].push_back(static_cast<int>(t));
      guard_[p].push_back(flatten(tr.guard, true));
      if (!tr.clock_free()) {
        const Value need = tr.hi == kInf ? tr.lo : tr.hi + 1;
        caps_[p][tr.from] = std::max(caps_[p][tr.from], need);
      }
      if (tr.port >= 0) {
        auto& parts = participants_[tr.port];
        if (parts.empty() || parts.back() != static_cast<int>(p)) parts.push_back(static_cast<int>(p));
      }
    }
    for (Value cap : caps_[p]) max_caps_[p] = std::max(max_caps_[p], cap);
  }
}

Configuration Semantics::initial() const {
  Configuration c;
  for (const auto& p : net_.processes) c.loc.push_back(p.initial);
  for (const auto& v : net_.vars) c.vals.push_back(v.init);
  c.clocks.assign(net_.processes.size(), 0);
  return c;
}

bool Semantics::eval(const Expr& e, const Configuration& c) const {
  switch (e.op) {
    case Expr::Op::True: return true;
    case Expr::Op::False: return false;
    case Expr::Op::Eq: return c.vals[e.a] == e.b;
    case Expr::Op::Lt: return c.vals[e.a] < e.b;
    case Expr::Op::Le: return c.vals[e.a] <= e.b;
    case Expr::Op::EqVar: return c.vals[e.a] == c.vals[e.b];
    case Expr::Op::At: return c.loc[e.a] == e.b;
    case Expr::Op::Not: return !eval(e.args[0], c);
    case Expr::Op::And:
      for (const auto& x : e.args)
        if (!eval(x, c)) return false;
      return true;
    case Expr::Op::Or:
      for (const auto& x : e.args)
        if (eval(x, c)) return true;
      return false;
  }
  return false;
}

namespace {

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& x : e.args) n += node_count(x);
  return n;
}

constexpr std::size_t kShareAbove = 24;

struct Memo {
  const void* owner = nullptr;
  std::uint64_t gen = 0;
  std::vector<std::uint64_t> stamp;
  std::vector<char> value;
};

thread_local Memo memo;

}  // namespace

std::uint64_t Semantics::next_generation() { return ++memo.gen; }

int Semantics::flatten(const Expr& e, bool root) {
  const bool big = node_count(e) > kShareAbove;
  if (big) {
    for (const auto& [x, at] : shared_) {
      if (!(*x == e)) continue;
      if (root) return at;
      Node n{e.op};
      n.ref = true;
      n.a = at;
      code_.push_back(n);
      return static_cast<int>(code_.size()) - 1;
    }
  }
  const int at = static_cast<int>(code_.size());
  code_.push_back({e.op, false, e.a, e.b, 1, big ? memo_slots_++ : -1});
  if (big) shared_.emplace_back(&e, at);
  for (const auto& x : e.args) flatten(x);
  code_[at].size = static_cast<int>(code_.size()) - at;
  return at;
}

bool Semantics::run_code(int i, const Configuration& c) const {
  const Node& n = code_[i];
  if (n.ref) return run_code(n.a, c);
  if (n.memo >= 0) {
    if (memo.owner != this || memo.stamp.size() != static_cast<std::size_t>(memo_slots_)) {
      memo.owner = this;
      memo.stamp.assign(static_cast<std::size_t>(memo_slots_), 0);
      memo.value.assign(static_cast<std::size_t>(memo_slots_), 0);
    }
    auto& st = memo.stamp[static_cast<std::size_t>(n.memo)];
    if (st == memo.gen) return memo.value[static_cast<std::size_t>(n.memo)];
    st = memo.gen;
  }
  bool r = false;
  switch (n.op) {
    case Expr::Op::True: r = true; break;
    case Expr::Op::False: r = false; break;
    case Expr::Op::Eq: r = c.vals[n.a] == n.b; break;
    case Expr::Op::Lt: r = c.vals[n.a] < n.b; break;
    case Expr::Op::Le: r = c.vals[n.a] <= n.b; break;
    case Expr::Op::EqVar: r = c.vals[n.a] == c.vals[n.b]; break;
    case Expr::Op::At: r = c.loc[n.a] == n.b; break;
    case Expr::Op::Not: r = !run_code(i + 1, c); break;
    case Expr::Op::And:
      r = true;
      for (int j = i + 1, end = i + n.size; j < end && r; j += code_[j].size) r = run_code(j, c);
      break;
    case Expr::Op::Or:
      r = false;
      for (int j = i + 1, end = i + n.size; j < end && !r; j += code_[j].size) r = run_code(j, c);
      break;
  }
  if (n.memo >= 0) memo.value[static_cast<std::size_t>(n.memo)] = r;
  return r;
}

bool Semantics::transition_enabled(const Configuration& c, int proc, int trans) const {
  next_generation();
  return enabled_now(c, proc, trans);
}

bool Semantics::enabled_now(const Configuration& c, int proc, int trans) const {
  const Transition& t = net_.processes[proc].transitions[trans];
  if (c.loc[proc] != t.from) return false;
  if (!t.clock_free()) {
    const Value clk = c.clocks[proc];
    if (clk < t.lo || clk > t.hi) return false;
  }
  return run_code(guard_[proc][trans], c);
}

void Semantics::enabled_into(const Configuration& c, std::vector<FireCandidate>& out) const {
  out.clear();
  struct SyncHit {
    int port, proc, trans;
  };
  thread_local std::vector<SyncHit> hits;
  hits.clear();
  next_generation();
  const int np = static_cast<int>(net_.processes.size());
  for (int p = 0; p < np; ++p) {
    const auto& trs = net_.processes[p].transitions;
    for (int t : outgoing_[p][c.loc[p]]) {
      if (!enabled_now(c, p, t)) continue;
      if (trs[t].port < 0)
        out.push_back({-1, {{p, t}}});
      else
        hits.push_back({trs[t].port, p, t});
    }
  }
  if (!hits.empty()) {
    std::stable_sort(hits.begin(), hits.end(),
                     [](const SyncHit& a, const SyncHit& b) { return a.port < b.port; });
    for (std::size_t lo = 0; lo < hits.size();) {
      std::size_t hi = lo;
      while (hi < hits.size() && hits[hi].port == hits[lo].port) ++hi;
      const auto& parts = participants_[hits[lo].port];
      // Group the hits of this port by participant.
      thread_local std::vector<std::pair<std::size_t, std::size_t>> spans;
      spans.clear();
      std::size_t i = lo;
      for (int proc : parts) {
        const std::size_t b = i;
        while (i < hi && hits[i].proc == proc) ++i;
        if (i == b) break;
        spans.emplace_back(b, i);
      }
      if (spans.size() == parts.size() && i == hi) {
        thread_local std::vector<std::size_t> idx;
        idx.clear();
        for (const auto& s : spans) idx.push_back(s.first);
        while (true) {
          FireCandidate cand{hits[lo].port, {}};
          for (std::size_t k = 0; k < spans.size(); ++k)
            cand.parts.emplace_back(hits[idx[k]].proc, hits[idx[k]].trans);
          out.push_back(std::move(cand));
          int k = static_cast<int>(spans.size()) - 1;
          while (k >= 0 && ++idx[k] == spans[k].second) {
            idx[k] = spans[k].first;
            --k;
          }
          if (k < 0) break;
        }
      }
      lo = hi;
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<FireCandidate> Semantics::enabled(const Configuration& c) const {
  std::vector<FireCandidate> out;
  enabled_into(c, out);
  return out;
}

void Semantics::apply_actions(Configuration& c, int proc, int trans) const {
  const Transition& t = net_.processes[proc].transitions[trans];
  for (const auto& a : t.actions) {
    const Value v = a.src >= 0 ? c.vals[a.src] + a.value : a.value;
    const VarDecl& d = net_.vars[a.var];
    if (v < d.min || v > d.max) throw RangeFault(net_.processes[proc].name, t.name, d.name, v);
    c.vals[a.var] = v;
  }
}

void Semantics::fire_in_place(Configuration& c, const FireCandidate& cand) const {
  for (const auto& [p, t] : cand.parts) apply_actions(c, p, t);
  for (const auto& [p, t] : cand.parts) {
    c.loc[p] = net_.processes[p].transitions[t].to;
    c.clocks[p] = 0;
  }
}

Configuration Semantics::fire(const Configuration& c, const FireCandidate& cand) const {
  Configuration n = c;
  fire_in_place(n, cand);
  return n;
}

bool Semantics::can_advance(const Configuration& c,
                            const std::vector<FireCandidate>& enabled) const {
  for (const auto& cand : enabled) {
    for (const auto& [p, t] : cand.parts) {
      const Transition& tr = net_.processes[p].transitions[t];
      if (tr.hi == kInf) continue;
      if (tr.clock_free()) return false;  // [0,0]
      if (c.clocks[p] + 1 > tr.hi) return false;
    }
  }
  return true;
}

bool Semantics::can_advance(const Configuration& c) const { return can_advance(c, enabled(c)); }

void Semantics::advance_in_place(Configuration& c) const {
  for (std::size_t p = 0; p < c.clocks.size(); ++p)
    c.clocks[p] = std::min<Value>(c.clocks[p] + 1, caps_[p][c.loc[p]]);
}

std::optional<Configuration> Semantics::advance_time(const Configuration& c) const {
  if (!can_advance(c)) return std::nullopt;
  Configuration n = c;
  advance_in_place(n);
  return n;
}

bool Semantics::is_deadlock(const Configuration& c,
                            const std::vector<FireCandidate>& enabled) const {
  if (!enabled.empty()) return false;
  for (std::size_t p = 0; p < c.clocks.size(); ++p)
    if (c.clocks[p] != caps_[p][c.loc[p]]) return false;
  return true;
}

bool Semantics::is_deadlock(const Configuration& c) const { return is_deadlock(c, enabled(c)); }

}  // namespace proskill::ir
