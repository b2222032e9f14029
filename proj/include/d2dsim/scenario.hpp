#pragma once

#include <string>

#include "d2dsim/engine.hpp"

namespace d2dsim {

// Calibrated factory-floor deployment: an 18 m x 10 m hall, a wall-mounted
// base station, two conveyor belts, and 16 robots patrolling north-south
// lanes. This is what `generate-default` writes.
SimConfig default_scenario();

// Same hall with only three probe devices sharing the centre lane, phased a
// third of the patrol period apart. Used to study link-level LoS coverage.
SimConfig three_probe_scenario();

// Parsing rejects unknown keys, missing fields, type mismatches, and
// invariant violations, always naming the offending key path.
SimConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const SimConfig& cfg);

}  // namespace d2dsim
