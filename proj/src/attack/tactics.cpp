#include "ctigap/attack/tactics.hpp"

#include <cctype>

namespace ctigap::attack {

namespace {

constexpr std::array<std::string_view, kTacticCount> kDisplayNames = {
    "Reconnaissance",     "Resource Development", "Initial Access", "Execution",
    "Persistence",        "Privilege Escalation", "Defense Evasion", "Credential Access",
    "Discovery",          "Lateral Movement",     "Collection",      "Command and Control",
    "Exfiltration",       "Impact",
};

constexpr std::array<std::string_view, kTacticCount> kPhaseNames = {
    "reconnaissance",     "resource-development", "initial-access",  "execution",
    "persistence",        "privilege-escalation", "defense-evasion", "credential-access",
    "discovery",          "lateral-movement",     "collection",      "command-and-control",
    "exfiltration",       "impact",
};

std::string normalize(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (c == ' ' || c == '_') {
            out.push_back('-');
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

}  // namespace

const std::array<std::string_view, kTacticCount>& tactic_display_names() {
    return kDisplayNames;
}

const std::array<std::string_view, kTacticCount>& tactic_phase_names() {
    return kPhaseNames;
}

std::optional<int> tactic_index(std::string_view name) {
    const std::string key = normalize(name);
    for (int i = 0; i < kTacticCount; ++i) {
        if (key == kPhaseNames[i]) {
            return i;
        }
    }
    return std::nullopt;
}

std::string_view tactic_display_name(int index) {
    return kDisplayNames.at(static_cast<std::size_t>(index));
}

std::string_view tactic_phase_name(int index) {
    return kPhaseNames.at(static_cast<std::size_t>(index));
}

}  // namespace ctigap::attack
