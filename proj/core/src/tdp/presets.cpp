#include "teamsim/tdp/presets.hpp"

#include <algorithm>
#include <array>

#include "teamsim/tdp/errors.hpp"
#include "teamsim/tdp/parser.hpp"

namespace teamsim::tdp {
namespace {

// Generated from patterns/*.tdp at configure time.
#include "preset_table.inc"

}  // namespace

std::span<const PresetSource> presets() { return kPresetTable; }

std::optional<std::string_view> preset_source(std::string_view name) {
    auto it = std::find_if(kPresetTable.begin(), kPresetTable.end(), [&](const auto& p) { return p.name == name; });
    if (it == kPresetTable.end()) return std::nullopt;
    return it->source;
}

Pattern load_preset(std::string_view name) {
    auto src = preset_source(name);
    if (!src) throw UnknownReference("preset", std::string(name));
    return parse_pattern(*src);
}

}  // namespace teamsim::tdp
