#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "proskill/ir.hpp"

namespace proskill::ir {

/// One global model state. Clocks count ticks since entry into the current
/// state and saturate at that state's cap.
struct Configuration {
  std::vector<Value> loc;
  std::vector<Value> vals;
  std::vector<Value> clocks;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// (process, transition) pairs with inline storage for small rendezvous.
class PartList {
 public:
  using value_type = std::pair<int, int>;
  PartList() = default;
  PartList(std::initializer_list<value_type> xs) {
    for (const auto& x : xs) push_back(x);
  }
  void push_back(value_type x) {
    if (n_ < kInline) {
      inline_[n_++] = x;
      return;
    }
    if (n_ == kInline) heap_.assign(inline_.begin(), inline_.end());
    heap_.push_back(x);
    ++n_;
  }
  void emplace_back(int proc, int trans) { push_back({proc, trans}); }
  void clear() {
    n_ = 0;
    heap_.clear();
  }
  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  const value_type* begin() const { return n_ <= kInline ? inline_.data() : heap_.data(); }
  const value_type* end() const { return begin() + n_; }
  const value_type& operator[](std::size_t i) const { return begin()[i]; }
  const value_type& front() const { return *begin(); }

  friend bool operator==(const PartList& a, const PartList& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
  friend bool operator<(const PartList& a, const PartList& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  static constexpr std::size_t kInline = 4;
  std::size_t n_ = 0;
  std::array<value_type, kInline> inline_{};
  std::vector<value_type> heap_;
};

/// A fireable step: one transition, or one transition per participant of a port.
struct FireCandidate {
  int port = -1;
  PartList parts;  // (process, transition), process order

  friend bool operator==(const FireCandidate&, const FireCandidate&) = default;
  friend bool operator<(const FireCandidate& a, const FireCandidate& b) { return a.parts < b.parts; }
};

class ModelFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeFault : public ModelFault {
 public:
  RangeFault(std::string process, std::string transition, std::string var, Value value)
      : ModelFault("value " + std::to_string(value) + " out of range for " + var + " in " +
                   process + "." + transition),
        process(std::move(process)), transition(std::move(transition)), var(std::move(var)),
        value(value) {}
  std::string process, transition, var;
  Value value;
};

/// Discrete-tick operational semantics of a network. Immutable after
/// construction and safe to share between threads.
class Semantics {
 public:
  explicit Semantics(const ProcessNetwork& net);

  const ProcessNetwork& net() const { return net_; }
  Configuration initial() const;

  bool eval(const Expr& e, const Configuration& c) const;
  bool transition_enabled(const Configuration& c, int proc, int trans) const;

  /// Candidates in canonical order (lexicographic on participants).
  std::vector<FireCandidate> enabled(const Configuration& c) const;
  void enabled_into(const Configuration& c, std::vector<FireCandidate>& out) const;

  /// Throws RangeFault when an assignment leaves a variable's domain.
  Configuration fire(const Configuration& c, const FireCandidate& cand) const;
  void fire_in_place(Configuration& c, const FireCandidate& cand) const;

  /// True when one tick can pass without an enabled transition overrunning its window.
  bool can_advance(const Configuration& c) const;
  bool can_advance(const Configuration& c, const std::vector<FireCandidate>& enabled) const;

  /// One tick later, or nullopt when time is blocked.
  std::optional<Configuration> advance_time(const Configuration& c) const;
  void advance_in_place(Configuration& c) const;

  bool is_deadlock(const Configuration& c) const;
  bool is_deadlock(const Configuration& c, const std::vector<FireCandidate>& enabled) const;

  /// Clock saturation value for a process sitting in `state`.
  Value clock_cap(int proc, int state) const { return caps_[proc][state]; }
  Value max_clock_cap(int proc) const { return max_caps_[proc]; }

  const std::vector<int>& port_participants(int port) const { return participants_[port]; }

 private:
  const ProcessNetwork& net_;
  std::vector<std::vector<Value>> caps_;
  std::vector<Value> max_caps_;
  std::vector<std::vector<int>> participants_;
  // outgoing_[p][s] = transition indices from state s, in index order
  std::vector<std::vector<std::vector<int>>> outgoing_;

  // Guards flattened in preorder; size is the node count of the subtree.
  // Large subtrees shared between guards are emitted once and referenced,
  // with their value memoized per configuration.
  struct Node {
    Expr::Op op;
    bool ref = false;  // a = index of the shared subtree
    int a = 0, b = 0, size = 1;
    int memo = -1;
  };
  std::vector<Node> code_;
  std::vector<std::vector<int>> guard_;  // guard_[p][t] = root index in code_
  std::vector<std::pair<const Expr*, int>> shared_;
  int memo_slots_ = 0;

  int flatten(const Expr& e, bool root = false);
  bool run_code(int i, const Configuration& c) const;
  bool enabled_now(const Configuration& c, int proc, int trans) const;
  static std::uint64_t next_generation();
  void apply_actions(Configuration& c, int proc, int trans) const;
};

}  // namespace proskill::ir
