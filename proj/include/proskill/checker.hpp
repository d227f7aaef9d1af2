#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proskill/ir.hpp"
#include "proskill/property.hpp"
#include "proskill/semantics.hpp"
#include "proskill/trace.hpp"

namespace proskill::check {

enum class Result { True, False, Unknown };

std::string to_string(Result r);

struct Limits {
  std::uint64_t max_configs = 50'000'000;
  std::int64_t max_ticks = -1;  // model time bound on discovery paths; -1 = none
  double budget_seconds = 0;    // wall time; 0 = none
};

struct Stats {
  std::uint64_t configurations = 0;
  std::uint64_t transitions = 0;
  double seconds = 0;
  bool truncated = false;
  std::string truncation;  // which limit stopped exploration
};

/// Canonical fixed-width bit packing of configurations.
class Packer {
 public:
  explicit Packer(const ir::Semantics& sem);
  std::size_t words() const { return words_; }
  void pack(const ir::Configuration& c, std::uint64_t* out) const;
  void unpack(const std::uint64_t* in, ir::Configuration& c) const;

  /// Overwrite one component of an already packed configuration.
  void set_loc(std::uint64_t* w, int p, ir::Value v) const { put(w, loc_[p], v); }
  void set_clock(std::uint64_t* w, int p, ir::Value v) const { put(w, clock_[p], v); }
  void set_val(std::uint64_t* w, int v, ir::Value x) const { put(w, val_[v], x); }

 private:
  struct Field {
    int word, shift;
    std::uint64_t mask;
    ir::Value offset;
  };
  enum class Slot : std::uint8_t { Loc, Clock, Val };
  struct Live {
    Field f;
    Slot slot;
    int index;
  };
  std::size_t np_ = 0, nv_ = 0, words_ = 0;
  std::vector<Field> loc_, clock_, val_;
  std::vector<Live> live_, fixed_;  // fixed_: zero-width fields
  std::vector<Live> live_loc_, live_clock_, live_val_;

  static void put(std::uint64_t* w, const Field& f, ir::Value v) {
    w[f.word] = (w[f.word] & ~(f.mask << f.shift)) |
                ((static_cast<std::uint64_t>(v - f.offset) & f.mask) << f.shift);
  }
};

/// Reachable configurations in breadth-first order, with BFS-tree parents.
class StateGraph {
 public:
  StateGraph(ir::ProcessNetwork net, Limits limits);
  StateGraph(const StateGraph&) = delete;
  StateGraph& operator=(const StateGraph&) = delete;

  const ir::ProcessNetwork& net() const { return *net_; }
  const ir::Semantics& semantics() const { return *sem_; }
  const Limits& limits() const { return limits_; }
  const Stats& stats() const { return stats_; }
  bool truncated() const { return stats_.truncated; }

  std::size_t size() const { return parent_.size(); }
  ir::Configuration config(std::size_t i) const;
  void config_into(std::size_t i, ir::Configuration& c) const;
  std::uint32_t parent(std::size_t i) const { return parent_[i]; }
  std::uint32_t tick(std::size_t i) const { return tick_[i]; }
  std::uint32_t depth(std::size_t i) const;
  bool deadlock(std::size_t i) const { return deadlock_[i]; }
  bool expanded(std::size_t i) const { return i < expanded_; }
  /// Index of a configuration, if reachable.
  std::optional<std::size_t> find(const ir::Configuration& c) const;

 private:
  std::unique_ptr<ir::ProcessNetwork> net_;
  std::unique_ptr<ir::Semantics> sem_;
  std::unique_ptr<Packer> packer_;
  Limits limits_;
  Stats stats_;
  std::vector<std::uint64_t> arena_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> parent_, tick_;
  std::vector<bool> deadlock_;
  std::size_t expanded_ = 0;

  std::uint64_t hash(const std::uint64_t* w) const;
  std::pair<std::uint32_t, bool> insert(const std::uint64_t* w);
  void grow();
  void run();
};

struct Verdict {
  std::string property;
  Property::Kind kind = Property::Kind::Reachable;
  Result result = Result::Unknown;
  std::optional<bool> expect;
  Trace witness;
  bool has_witness = false;
  Stats stats;

  /// Matches the expectation, or carries no expectation.
  bool as_expected() const;
  nlohmann::json to_json() const;
};

StateGraph explore(const ir::ProcessNetwork& net, const Limits& limits);

/// LEADSTO properties explore a copy of the network with an observer process.
Verdict check(const StateGraph& graph, const Property& prop);
std::vector<Verdict> check_all(const ir::ProcessNetwork& net, const std::vector<Property>& props,
                               const Limits& limits);

/// Observer that reaches `violated` when k+1 ticks pass after p without q.
ir::ProcessNetwork inject_leadsto_monitor(const ir::ProcessNetwork& net, const ir::Expr& p,
                                          const ir::Expr& q, ir::Value k);

/// Shortest path from the initial configuration, as fire and var events.
Trace witness_trace(const StateGraph& graph, std::size_t index);

/// 0 all as expected, 1 some verdict contradicts its expectation, 2 unknown.
int exit_code(const std::vector<Verdict>& verdicts);

}  // namespace proskill::check
