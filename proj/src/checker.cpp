#include "proskill/checker.hpp"

#include <bit>
#include <chrono>
#include <stdexcept>

namespace proskill::check {

using ir::Configuration;
using ir::Expr;
using ir::Value;

std::string to_string(Result r) {
  switch (r) {
    case Result::True: return "TRUE";
    case Result::False: return "FALSE";
    case Result::Unknown: return "UNKNOWN";
  }
  return "";
}

namespace {
int bits_for(std::uint64_t range) { return range == 0 ? 0 : std::bit_width(range); }
}  // namespace

Packer::Packer(const ir::Semantics& sem) {
  const auto& net = sem.net();
  np_ = net.processes.size();
  nv_ = net.vars.size();
  int word = 0, used = 0;
  auto field = [&](std::uint64_t range, Value offset) {
    const int b = bits_for(range);
    if (used + b > 64) {
      ++word;
      used = 0;
    }
    Field f{word, used, b == 64 ? ~0ULL : ((1ULL << b) - 1), offset};
    used += b;
    return f;
  };
  for (std::size_t p = 0; p < np_; ++p) {
    loc_.push_back(field(net.processes[p].states.size() - 1, 0));
    clock_.push_back(field(static_cast<std::uint64_t>(sem.max_clock_cap(static_cast<int>(p))), 0));
  }
  for (const auto& v : net.vars)
    val_.push_back(field(static_cast<std::uint64_t>(v.max) - static_cast<std::uint64_t>(v.min), v.min));
  words_ = static_cast<std::size_t>(word) + 1;
  auto sort = [&](const Field& f, Slot slot, std::size_t i) {
    const Live l{f, slot, static_cast<int>(i)};
    if (!f.mask) {
      fixed_.push_back(l);
      return;
    }
    live_.push_back(l);
    (slot == Slot::Loc ? live_loc_ : slot == Slot::Clock ? live_clock_ : live_val_).push_back(l);
  };
  for (std::size_t p = 0; p < np_; ++p) {
    sort(loc_[p], Slot::Loc, p);
    sort(clock_[p], Slot::Clock, p);
  }
  for (std::size_t v = 0; v < nv_; ++v) sort(val_[v], Slot::Val, v);
}

void Packer::pack(const Configuration& c, std::uint64_t* out) const {
  for (std::size_t i = 0; i < words_; ++i) out[i] = 0;
  for (const Live& l : live_) {
    const Value v = l.slot == Slot::Loc     ? c.loc[l.index]
                    : l.slot == Slot::Clock ? c.clocks[l.index]
                                            : c.vals[l.index];
    out[l.f.word] |= (static_cast<std::uint64_t>(v - l.f.offset) & l.f.mask) << l.f.shift;
  }
}

void Packer::unpack(const std::uint64_t* in, Configuration& c) const {
  c.loc.resize(np_);
  c.clocks.resize(np_);
  c.vals.resize(nv_);
  for (const Live& l : fixed_) {
    auto& dst = l.slot == Slot::Loc ? c.loc : l.slot == Slot::Clock ? c.clocks : c.vals;
    dst[l.index] = l.f.offset;
  }
  auto get = [in](const Live& l) {
    return static_cast<Value>((in[l.f.word] >> l.f.shift) & l.f.mask) + l.f.offset;
  };
  for (const Live& l : live_loc_) c.loc[l.index] = get(l);
  for (const Live& l : live_clock_) c.clocks[l.index] = get(l);
  for (const Live& l : live_val_) c.vals[l.index] = get(l);
}

namespace {
constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

StateGraph::StateGraph(ir::ProcessNetwork net, Limits limits)
    : net_(std::make_unique<ir::ProcessNetwork>(std::move(net))), limits_(limits) {
  sem_ = std::make_unique<ir::Semantics>(*net_);
  packer_ = std::make_unique<Packer>(*sem_);
  table_.assign(1 << 12, kEmpty);
  run();
}

std::uint64_t StateGraph::hash(const std::uint64_t* w) const {
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < packer_->words(); ++i) h = mix(h ^ w[i]);
  return h;
}

void StateGraph::grow() {
  std::vector<std::uint32_t> next(table_.size() * 2, kEmpty);
  const std::size_t mask = next.size() - 1;
  const std::size_t W = packer_->words();
  for (std::uint32_t idx : table_) {
    if (idx == kEmpty) continue;
    std::size_t slot = hash(&arena_[idx * W]) & mask;
    while (next[slot] != kEmpty) slot = (slot + 1) & mask;
    next[slot] = idx;
  }
  table_.swap(next);
}

std::pair<std::uint32_t, bool> StateGraph::insert(const std::uint64_t* w) {
  const std::size_t W = packer_->words();
  if ((parent_.size() + 1) * 2 > table_.size()) grow();
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = hash(w) & mask;
  while (table_[slot] != kEmpty) {
    const std::uint64_t* other = &arena_[table_[slot] * W];
    bool same = true;
    for (std::size_t i = 0; i < W && same; ++i) same = other[i] == w[i];
    if (same) return {table_[slot], false};
    slot = (slot + 1) & mask;
  }
  const auto idx = static_cast<std::uint32_t>(parent_.size());
  table_[slot] = idx;
  arena_.insert(arena_.end(), w, w + W);
  parent_.push_back(kEmpty);
  tick_.push_back(0);
  deadlock_.push_back(false);
  return {idx, true};
}

std::optional<std::size_t> StateGraph::find(const Configuration& c) const {
  std::vector<std::uint64_t> w(packer_->words());
  packer_->pack(c, w.data());
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = hash(w.data()) & mask;
  const std::size_t W = packer_->words();
  while (table_[slot] != kEmpty) {
    const std::uint64_t* other = &arena_[table_[slot] * W];
    if (std::equal(w.begin(), w.end(), other)) return table_[slot];
    slot = (slot + 1) & mask;
  }
  return std::nullopt;
}

Configuration StateGraph::config(std::size_t i) const {
  Configuration c;
  config_into(i, c);
  return c;
}

void StateGraph::config_into(std::size_t i, Configuration& c) const {
  packer_->unpack(&arena_[i * packer_->words()], c);
}

std::uint32_t StateGraph::depth(std::size_t i) const {
  std::uint32_t d = 0;
  while (parent_[i] != kEmpty) {
    i = parent_[i];
    ++d;
  }
  return d;
}

void StateGraph::run() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const std::size_t W = packer_->words();
  std::vector<std::uint64_t> buf(W);
  Configuration c = sem_->initial(), next;
  packer_->pack(c, buf.data());
  insert(buf.data());
  std::vector<ir::FireCandidate> cands;

  std::vector<std::uint64_t> base(W);
  auto add = [&](std::uint32_t from, std::uint32_t tk) {
    ++stats_.transitions;
    auto [idx, fresh] = insert(buf.data());
    if (fresh) {
      parent_[idx] = from;
      tick_[idx] = tk;
    }
  };

  std::size_t i = 0;
  for (; i < parent_.size(); ++i) {
    if (parent_.size() >= limits_.max_configs) {
      stats_.truncated = true;
      stats_.truncation = "max configurations";
      break;
    }
    if (limits_.budget_seconds > 0 && (i & 1023) == 0 &&
        std::chrono::duration<double>(clock::now() - t0).count() > limits_.budget_seconds) {
      stats_.truncated = true;
      stats_.truncation = "wall budget";
      break;
    }
    packer_->unpack(&arena_[i * W], c);
    const auto from = static_cast<std::uint32_t>(i);
    const std::uint32_t tk = tick_[i];
    sem_->enabled_into(c, cands);
    if (cands.empty() && sem_->is_deadlock(c, cands)) deadlock_[i] = true;
    std::copy_n(&arena_[i * W], W, base.data());
    for (const auto& cand : cands) {
      next = c;
      sem_->fire_in_place(next, cand);
      // Only participants and assigned variables change.
      buf = base;
      for (const auto& [p, t] : cand.parts) {
        packer_->set_loc(buf.data(), p, next.loc[p]);
        packer_->set_clock(buf.data(), p, 0);
        for (const auto& a : net_->processes[p].transitions[t].actions)
          packer_->set_val(buf.data(), a.var, next.vals[a.var]);
      }
      add(from, tk);
    }
    if (sem_->can_advance(c, cands)) {
      next = c;
      sem_->advance_in_place(next);
      if (!(next == c)) {
        if (limits_.max_ticks >= 0 && tk >= limits_.max_ticks) {
          stats_.truncated = true;
          stats_.truncation = "max ticks";
        } else {
          packer_->pack(next, buf.data());
          add(from, tk + 1);
        }
      }
    }
  }
  expanded_ = i;
  stats_.configurations = parent_.size();
  stats_.seconds = std::chrono::duration<double>(clock::now() - t0).count();
}

StateGraph explore(const ir::ProcessNetwork& net, const Limits& limits) {
  return StateGraph(net, limits);
}

Trace witness_trace(const StateGraph& g, std::size_t index) {
  std::vector<std::size_t> path;
  for (std::size_t i = index;; i = g.parent(i)) {
    path.push_back(i);
    if (g.parent(i) == kEmpty) break;
  }
  const auto& net = g.net();
  const auto& sem = g.semantics();
  Trace out;
  Configuration cur = g.config(path.back());
  std::int64_t tick = 0;
  for (std::size_t k = path.size() - 1; k-- > 0;) {
    const Configuration target = g.config(path[k]);
    bool found = false;
    for (const auto& cand : sem.enabled(cur)) {
      Configuration n = sem.fire(cur, cand);
      if (!(n == target)) continue;
      found = true;
      std::string label;
      for (auto [p, t] : cand.parts) {
        const auto& tr = net.processes[p].transitions[t];
        if (label.empty()) label = tr.label;
      }
      for (auto [p, t] : cand.parts) {
        TraceEvent e;
        e.tick = tick;
        e.kind = "fire";
        e.process = net.processes[p].name;
        e.transition = net.processes[p].transitions[t].name;
        e.message = label;
        out.push_back(std::move(e));
      }
      for (std::size_t v = 0; v < net.vars.size(); ++v)
        if (cur.vals[v] != n.vals[v])
          out.push_back({tick, "var", "", "", net.vars[v].name, net.vars[v].format(cur.vals[v]),
                         net.vars[v].format(n.vals[v]), ""});
      break;
    }
    if (!found) ++tick;
    cur = target;
  }
  return out;
}

ir::ProcessNetwork inject_leadsto_monitor(const ir::ProcessNetwork& net, const Expr& p,
                                          const Expr& q, Value k) {
  ir::ProcessNetwork out = net;
  ir::ProcessDef m;
  m.name = "leadsto_monitor";
  m.category = "property";
  m.states = {{"idle", ir::Marker::None, ""},
              {"armed", ir::Marker::None, ""},
              {"violated", ir::Marker::ErrorState, ""}};
  auto tr = [](std::string name, int from, int to, Expr guard, Value lo, Value hi) {
    ir::Transition t;
    t.name = std::move(name);
    t.from = from;
    t.to = to;
    t.guard = std::move(guard);
    t.lo = lo;
    t.hi = hi;
    return t;
  };
  m.transitions.push_back(tr("arm", 0, 1, Expr::conj({p, Expr::negate(q)}), 0, 0));
  m.transitions.push_back(tr("release", 1, 0, q, 0, 0));
  m.transitions.push_back(tr("violate", 1, 2, Expr::negate(q), k + 1, k + 1));
  out.processes.push_back(std::move(m));
  return out;
}

bool Verdict::as_expected() const {
  if (result == Result::Unknown) return false;
  return !expect || *expect == (result == Result::True);
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json j;
  j["property"] = property;
  j["kind"] = check::to_string(kind);
  j["result"] = check::to_string(result);
  if (expect) j["expect"] = *expect ? "TRUE" : "FALSE";
  j["stats"] = {{"configurations", stats.configurations},
                {"transitions", stats.transitions},
                {"seconds", stats.seconds},
                {"truncated", stats.truncated}};
  if (has_witness) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& e : witness) w.push_back(e.to_json());
    j["witness"] = w;
  }
  return j;
}

namespace {

Verdict search(const StateGraph& g, const Property& prop, const Expr& pred, bool found_means) {
  Verdict v;
  v.property = prop.name;
  v.kind = prop.kind;
  v.expect = prop.expect;
  v.stats = g.stats();
  const auto& sem = g.semantics();
  Configuration c;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.config_into(i, c);
    if (!sem.eval(pred, c)) continue;
    v.result = found_means ? Result::True : Result::False;
    v.witness = witness_trace(g, i);
    v.has_witness = true;
    return v;
  }
  v.result = g.truncated() ? Result::Unknown : (found_means ? Result::False : Result::True);
  return v;
}

}  // namespace

Verdict check(const StateGraph& g, const Property& prop) {
  switch (prop.kind) {
    case Property::Kind::Reachable: return search(g, prop, prop.p, true);
    case Property::Kind::Absent: return search(g, prop, prop.p, false);
    case Property::Kind::DeadlockFree: {
      Verdict v;
      v.property = prop.name;
      v.kind = prop.kind;
      v.expect = prop.expect;
      v.stats = g.stats();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (g.deadlock(i)) {
          v.result = Result::False;
          v.witness = witness_trace(g, i);
          v.has_witness = true;
          return v;
        }
      v.result = g.truncated() ? Result::Unknown : Result::True;
      return v;
    }
    case Property::Kind::LeadsToWithin: {
      StateGraph mg(inject_leadsto_monitor(g.net(), prop.p, prop.q, prop.ticks), g.limits());
      const int m = static_cast<int>(mg.net().processes.size()) - 1;
      Property absent = prop;
      Verdict v = search(mg, absent, Expr::at(m, 2), false);
      v.kind = prop.kind;
      return v;
    }
  }
  throw std::logic_error("unknown property kind");
}

std::vector<Verdict> check_all(const ir::ProcessNetwork& net, const std::vector<Property>& props,
                               const Limits& limits) {
  StateGraph g(net, limits);
  std::vector<Verdict> out(props.size());
  // State predicates share one scan of the graph; the first hit in BFS order
  // gives the shortest witness, as in check().
  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < props.size(); ++k) {
    const auto kind = props[k].kind;
    if (kind == Property::Kind::Reachable || kind == Property::Kind::Absent)
      pending.push_back(k);
    else
      out[k] = check(g, props[k]);
  }
  std::vector<std::optional<std::size_t>> hit(props.size());
  const auto& sem = g.semantics();
  Configuration c;
  for (std::size_t i = 0; i < g.size() && !pending.empty(); ++i) {
    g.config_into(i, c);
    for (std::size_t j = 0; j < pending.size();) {
      const std::size_t k = pending[j];
      if (sem.eval(props[k].p, c)) {
        hit[k] = i;
        pending[j] = pending.back();
        pending.pop_back();
      } else {
        ++j;
      }
    }
  }
  for (std::size_t k = 0; k < props.size(); ++k) {
    const auto& prop = props[k];
    if (prop.kind != Property::Kind::Reachable && prop.kind != Property::Kind::Absent) continue;
    const bool reach = prop.kind == Property::Kind::Reachable;
    Verdict& v = out[k];
    v.property = prop.name;
    v.kind = prop.kind;
    v.expect = prop.expect;
    v.stats = g.stats();
    if (hit[k]) {
      v.result = reach ? Result::True : Result::False;
      v.witness = witness_trace(g, *hit[k]);
      v.has_witness = true;
    } else {
      v.result = g.truncated() ? Result::Unknown : (reach ? Result::False : Result::True);
    }
  }
  return out;
}

int exit_code(const std::vector<Verdict>& verdicts) {
  bool unknown = false;
  for (const auto& v : verdicts) {
    if (v.result == Result::Unknown) {
      unknown = true;
      continue;
    }
    if (!v.as_expected()) return 1;
  }
  return unknown ? 2 : 0;
}

}  // namespace proskill::check
