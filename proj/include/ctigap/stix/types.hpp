#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ctigap::stix {

enum class ObjectKind {
    kAttackPattern,
    kCampaign,
    kIntrusionSet,
    kMalware,
    kTool,
    kCourseOfAction,
    kTactic,
    kRelationship,
    kOther,
};

ObjectKind object_kind_from_type(std::string_view stix_type);
std::string_view to_string(ObjectKind kind);

enum class RelationshipKind {
    kUses,
    kAttributedTo,
    kSubtechniqueOf,
    kTargets,
    kDelivers,
    kMitigates,
    kOther,
};

RelationshipKind relationship_kind_from_type(std::string_view relationship_type);

struct ExternalRef {
    std::string source_name;
    std::string external_id;
    std::string url;
    // Full original entry, re-emitted verbatim on serialization.
    nlohmann::json raw;
};

struct KillChainPhase {
    std::string kill_chain_name;
    std::string phase_name;
    nlohmann::json raw;
};

// One parsed STIX domain object in uniform internal form. Recognized
// fields are typed; everything else lives in raw_extras and survives
// re-serialization byte for byte.
struct NormalizedObject {
    std::string stix_id;
    ObjectKind object_type = ObjectKind::kOther;
    std::string type_raw;  // verbatim, also for kinds mapped to kOther
    std::optional<std::string> name;
    std::optional<std::string> description;
    std::optional<std::string> created_raw;
    std::optional<std::string> modified_raw;
    std::int64_t created_us = 0;   // parsed; 0 when absent/unparseable
    std::int64_t modified_us = 0;  // parsed; falls back to created, then epoch
    std::vector<ExternalRef> external_refs;
    bool had_external_refs = false;
    std::vector<KillChainPhase> kill_chain_phases;
    bool had_kill_chain_phases = false;
    bool revoked = false;
    bool deprecated = false;
    std::optional<bool> revoked_raw;
    std::optional<bool> deprecated_raw;
    std::string source_tag;
    nlohmann::json raw_extras = nlohmann::json::object();

    // External id of the mitre-attack reference (Tdddd, C0001, G0005, ...)
    // or empty.
    std::string attack_external_id() const;

    // Re-serializes into a STIX-shaped JSON object. Contains every key of
    // the original input object.
    nlohmann::json to_json() const;
};

struct RelationshipRecord {
    std::string stix_id;
    RelationshipKind relationship_type = RelationshipKind::kOther;
    std::string relationship_type_raw;  // preserved verbatim
    std::string source_ref;
    std::string target_ref;
    std::string source_tag;
    std::optional<std::string> created_raw;
    std::optional<std::string> modified_raw;
    std::int64_t modified_us = 0;
    nlohmann::json raw_extras = nlohmann::json::object();

    nlohmann::json to_json() const;
};

// A bundle object that could not be normalized; parsing continues past it.
struct RejectedObject {
    std::size_t index;  // position within the bundle's objects array
    std::string reason;
    std::string source_tag;
};

}  // namespace ctigap::stix
