#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace proskill {

/// One line of a JSON-lines trace. Empty optional fields are omitted on output.
struct TraceEvent {
  std::int64_t tick = 0;
  std::string kind;  // program, event, interrupt_request, completion, fire, var, start,
                     // interrupt_task, print, warning, fault
  std::string process;
  std::string transition;
  std::string var;
  std::string old_value;
  std::string new_value;
  std::string message;

  nlohmann::json to_json() const;
  static TraceEvent from_json(const nlohmann::json& j);
  std::string to_line() const;  // compact JSON, no trailing newline

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

void write_trace(std::ostream& out, const Trace& trace);
/// Throws std::runtime_error naming the offending line.
Trace read_trace(std::istream& in);

}  // namespace proskill
