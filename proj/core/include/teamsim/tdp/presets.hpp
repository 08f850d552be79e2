#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "teamsim/tdp/pattern.hpp"

namespace teamsim::tdp {

struct PresetSource {
    std::string_view name;
    std::string_view source;
};

// Shipped presets, in a fixed order. Text is embedded from patterns/*.tdp.
std::span<const PresetSource> presets();
std::optional<std::string_view> preset_source(std::string_view name);

// Parses a shipped preset; throws UnknownReference("preset", name).
Pattern load_preset(std::string_view name);

}  // namespace teamsim::tdp
