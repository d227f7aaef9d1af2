#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

/// Timed process network: processes with per-state clocks, shared bounded
/// variables and multiway rendezvous ports. Times are integer ticks.
namespace proskill::ir {

using Value = std::int32_t;
inline constexpr Value kInf = std::numeric_limits<Value>::max();

enum class VarKind { Enum, Nat, Bool };

struct VarDecl {
  std::string name;
  VarKind kind = VarKind::Enum;
  std::vector<std::string> labels;  // Enum only
  Value min = 0;
  Value max = 0;
  Value init = 0;
  bool external = false;  // written by the host in RUN networks
  std::string sv;         // source state variable, if any

  Value size() const { return max - min + 1; }
  std::string format(Value v) const;
  std::optional<Value> parse(const std::string& text) const;
};

/// Boolean expressions over variables and process locations.
struct Expr {
  enum class Op : std::uint8_t { True, False, Eq, Lt, Le, EqVar, And, Or, Not, At };

  Op op = Op::True;
  int a = 0;  // variable (Eq/Lt/Le/EqVar) or process (At)
  int b = 0;  // value (Eq/Lt/Le), second variable (EqVar) or state (At)
  std::vector<Expr> args;

  static Expr t() { return {}; }
  static Expr f() { return {Op::False, 0, 0, {}}; }
  static Expr eq(int var, Value v) { return {Op::Eq, var, v, {}}; }
  static Expr ne(int var, Value v) { return negate(eq(var, v)); }
  static Expr lt(int var, Value v) { return {Op::Lt, var, v, {}}; }
  static Expr le(int var, Value v) { return {Op::Le, var, v, {}}; }
  static Expr at(int proc, int state) { return {Op::At, proc, state, {}}; }
  static Expr negate(Expr e);
  static Expr conj(std::vector<Expr> es);
  static Expr disj(std::vector<Expr> es);

  bool is_true() const { return op == Op::True; }
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Action {
  int var = 0;
  Value value = 0;
  int src = -1;  // when >= 0: var := src + value

  friend bool operator==(const Action&, const Action&) = default;
};

/// Host hook invoked when a RUN transition fires.
struct HostCall {
  enum class Kind { Start, Interrupt, Cancel };
  Kind kind = Kind::Start;
  int record = 0;

  friend bool operator==(const HostCall&, const HostCall&) = default;
};

enum class Marker { None, ErrorState, UndershootWarn, OvershootWarn, PostconditionWarn };

std::string to_string(Marker m);
std::optional<Marker> marker_from_string(const std::string& s);

struct Transition {
  std::string name;
  int from = 0;
  int to = 0;
  Value lo = 0;
  Value hi = kInf;
  Expr guard;
  int port = -1;
  std::vector<Action> actions;
  std::vector<HostCall> calls;
  std::string log;
  Marker marker = Marker::None;
  std::string label;  // observable step name, shared by CHECK and RUN

  /// [0,0] and [0,inf) windows do not look at the clock.
  bool clock_free() const { return lo == 0 && (hi == 0 || hi == kInf); }
};

struct State {
  std::string name;
  Marker marker = Marker::None;
  std::string note;
};

struct ProcessDef {
  std::string name;
  std::string category;  // sv, event, basic, composite, branch, watchdog, monitor, environment
  std::string skill;     // owning skill for skill-derived processes
  std::vector<State> states;
  int initial = 0;
  std::vector<Transition> transitions;

  int state_index(const std::string& s) const;
};

struct PortDecl {
  std::string name;
  std::string label;
};

/// One entry of the skill record array, flattened into five variables.
struct SkillRecordDecl {
  std::string name;
  std::string kind;  // basic, composite, branch
  int caller = -1;
  int status = -1;
  int inv_active = -1;
  int arg_index = -1;
  int val = -1;
  int process = -1;  // main process of the skill/branch
  int task = -1;     // RUN task completion slot (basic skills)
  bool interruptible = false;
};

struct CallArgument {
  std::string name;
  std::string text;
  double value = 0;
};

struct ProcessNetwork {
  std::string name;
  std::string mode;  // CHECK, RUN or empty for hand-written nets
  int tick_rate = 100;
  std::vector<VarDecl> vars;
  std::vector<PortDecl> ports;
  std::vector<ProcessDef> processes;
  std::vector<SkillRecordDecl> records;
  /// Row 0 is the empty argument list; call sites with arguments get their own row.
  std::vector<std::vector<CallArgument>> arg_table{{}};

  int var_index(const std::string& n) const;
  int process_index(const std::string& n) const;
  int port_index(const std::string& n) const;
  int record_index(const std::string& n) const;

  /// Throws std::invalid_argument on dangling indices or malformed windows.
  void check_well_formed() const;
};

/// Status values of the record status variable.
inline const std::vector<std::string> kStatusLabels = {"no_status", "success", "failure",
                                                       "failed_inv", "interrupted"};
enum StatusValue : Value { kNoStatus = 0, kSuccess, kFailure, kFailedInv, kInterrupted };
inline constexpr Value kCallerNone = 0;
inline constexpr Value kCallerRoot = 1;

}  // namespace proskill::ir
