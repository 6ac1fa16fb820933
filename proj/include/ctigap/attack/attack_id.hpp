#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ctigap::attack {

// Parsed ATT&CK technique identifier: Tdddd or Tdddd.ddd.
// subtechnique == 0 means "no sub-technique part" (real sub-techniques
// start at .001).
struct AttackId {
    unsigned technique = 0;
    unsigned subtechnique = 0;

    bool is_subtechnique() const { return subtechnique != 0; }

    // "T1003.008" -> "T1003"; identity for parent techniques.
    std::string parent() const;

    std::string to_string() const;

    friend auto operator<=>(const AttackId&, const AttackId&) = default;
};

std::optional<AttackId> parse_attack_id(std::string_view text);

// Ordering key for arbitrary external ids: parseable technique ids sort
// numerically and before everything else; the rest falls back to the raw
// string. Keeps matrix/universe ordering total and deterministic even for
// non-ATT&CK attack patterns.
struct ExternalIdKey {
    bool parseable;
    AttackId id;
    std::string raw;

    friend bool operator<(const ExternalIdKey& a, const ExternalIdKey& b) {
        if (a.parseable != b.parseable) {
            return a.parseable;
        }
        if (a.parseable && a.id != b.id) {
            return a.id < b.id;
        }
        return a.raw < b.raw;
    }
};

ExternalIdKey external_id_key(std::string_view text);

}  // namespace ctigap::attack
