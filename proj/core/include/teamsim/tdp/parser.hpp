#pragma once

#include <string_view>

#include "teamsim/tdp/errors.hpp"
#include "teamsim/tdp/pattern.hpp"

namespace teamsim::tdp {

// Parses a `.tdp` source. References are resolved after the whole file has
// been read, so declarations may appear in any order.
//
// Throws SyntaxError, DuplicateName, UnknownReference or DuplicateTrigger.
Pattern parse_pattern(std::string_view text);

}  // namespace teamsim::tdp
