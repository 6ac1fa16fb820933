#include "ctigap/attack/attack_id.hpp"

#include <cctype>
#include <cstdio>

namespace ctigap::attack {

namespace {

bool parse_number(std::string_view s, std::size_t& pos, unsigned& out) {
    unsigned value = 0;
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        value = value * 10 + static_cast<unsigned>(s[pos] - '0');
        ++pos;
    }
    out = value;
    return pos > start;
}

}  // namespace

std::string AttackId::parent() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%04u", technique);
    return std::string(buf);
}

std::string AttackId::to_string() const {
    char buf[24];
    if (subtechnique != 0) {
        std::snprintf(buf, sizeof(buf), "T%04u.%03u", technique, subtechnique);
    } else {
        std::snprintf(buf, sizeof(buf), "T%04u", technique);
    }
    return std::string(buf);
}

std::optional<AttackId> parse_attack_id(std::string_view text) {
    if (text.empty() || text[0] != 'T') {
        return std::nullopt;
    }
    std::size_t pos = 1;
    AttackId id;
    if (!parse_number(text, pos, id.technique)) {
        return std::nullopt;
    }
    if (pos < text.size()) {
        if (text[pos] != '.') {
            return std::nullopt;
        }
        ++pos;
        if (!parse_number(text, pos, id.subtechnique) || pos != text.size() ||
            id.subtechnique == 0) {
            return std::nullopt;
        }
    }
    return id;
}

ExternalIdKey external_id_key(std::string_view text) {
    ExternalIdKey key;
    key.raw = std::string(text);
    if (auto parsed = parse_attack_id(text)) {
        key.parseable = true;
        key.id = *parsed;
    } else {
        key.parseable = false;
    }
    return key;
}

}  // namespace ctigap::attack
