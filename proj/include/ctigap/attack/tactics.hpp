#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace ctigap::attack {

// The 14 Enterprise tactics in canonical matrix order.
inline constexpr int kTacticCount = 14;

// Display names, index 0 = Reconnaissance ... 13 = Impact.
const std::array<std::string_view, kTacticCount>& tactic_display_names();

// Kill-chain phase names as they appear in bundles ("resource-development").
const std::array<std::string_view, kTacticCount>& tactic_phase_names();

// Accepts either form ("Credential Access" or "credential-access"),
// case-insensitively. Returns the canonical index or nullopt.
std::optional<int> tactic_index(std::string_view name);

std::string_view tactic_display_name(int index);
std::string_view tactic_phase_name(int index);

}  // namespace ctigap::attack
