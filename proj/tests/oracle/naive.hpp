#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proskill/ir.hpp"
#include "proskill/property.hpp"

// Reference explorer for cross-checking the production checker. It shares
// only the IR data structures: states are plain vectors,
// expressions and timing rules are re-implemented from their definitions.
namespace oracle {

struct NaiveResult {
  std::size_t states = 0;
  bool complete = true;
  std::vector<std::string> verdicts;  // TRUE, FALSE or UNKNOWN, one per property
};

/// Breadth-first enumeration over unpacked states. Stops after
/// `max_states` and reports UNKNOWN for anything it could not decide.
NaiveResult enumerate(const proskill::ir::ProcessNetwork& net,
                      const std::vector<proskill::check::Property>& props,
                      std::size_t max_states = 2'000'000);

/// Only the reachable-set size.
std::size_t count_states(const proskill::ir::ProcessNetwork& net, std::size_t max_states = 2'000'000);

}  // namespace oracle
