#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "proskill/ir.hpp"
#include "proskill/trace.hpp"

namespace proskill::replay {

struct ReplayResult {
  enum class Verdict { Contained, Divergent };
  Verdict verdict = Verdict::Contained;
  std::int64_t step = -1;  // trace index of the first unmatched event
  std::int64_t tick = -1;
  std::string message;
  std::size_t max_frontier = 0;  // largest set of CHECK configurations tracked

  nlohmann::json to_json() const;
};

/// Thrown when the trace was produced from a different program.
class HashMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Guided walk of a runtime trace in a CHECK network. Labelled firings must be
/// matched in order at their tick; unlabelled steps are free; state variable
/// values must agree at every tick boundary. When `program_hash` is non-empty it
/// must equal the hash recorded in the trace's program event.
ReplayResult replay(const ir::ProcessNetwork& check_net, const Trace& trace,
                    const std::string& program_hash = {});

}  // namespace proskill::replay
