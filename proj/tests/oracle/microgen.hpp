#pragma once

#include <cstdint>
#include <string>

#include "proskill/translator.hpp"

namespace oracle {

/// A small random ProSkill program: at most three state variables, at most
/// two skills, time intervals of at most five seconds (ticks at rate 1).
struct MicroProgram {
  std::string source;
  proskill::translate::EnvOptions env;
};

MicroProgram generate(std::uint64_t seed);

}  // namespace oracle
