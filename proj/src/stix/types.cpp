#include "ctigap/stix/types.hpp"

namespace ctigap::stix {

ObjectKind object_kind_from_type(std::string_view stix_type) {
    if (stix_type == "attack-pattern") return ObjectKind::kAttackPattern;
    if (stix_type == "campaign") return ObjectKind::kCampaign;
    if (stix_type == "intrusion-set") return ObjectKind::kIntrusionSet;
    if (stix_type == "malware") return ObjectKind::kMalware;
    if (stix_type == "tool") return ObjectKind::kTool;
    if (stix_type == "course-of-action") return ObjectKind::kCourseOfAction;
    if (stix_type == "x-mitre-tactic") return ObjectKind::kTactic;
    if (stix_type == "relationship") return ObjectKind::kRelationship;
    return ObjectKind::kOther;
}

std::string_view to_string(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::kAttackPattern: return "attack-pattern";
        case ObjectKind::kCampaign: return "campaign";
        case ObjectKind::kIntrusionSet: return "intrusion-set";
        case ObjectKind::kMalware: return "malware";
        case ObjectKind::kTool: return "tool";
        case ObjectKind::kCourseOfAction: return "course-of-action";
        case ObjectKind::kTactic: return "x-mitre-tactic";
        case ObjectKind::kRelationship: return "relationship";
        case ObjectKind::kOther: return "other";
    }
    return "other";
}

RelationshipKind relationship_kind_from_type(std::string_view relationship_type) {
    if (relationship_type == "uses") return RelationshipKind::kUses;
    if (relationship_type == "attributed-to") return RelationshipKind::kAttributedTo;
    if (relationship_type == "subtechnique-of") return RelationshipKind::kSubtechniqueOf;
    if (relationship_type == "targets") return RelationshipKind::kTargets;
    if (relationship_type == "delivers") return RelationshipKind::kDelivers;
    if (relationship_type == "mitigates") return RelationshipKind::kMitigates;
    return RelationshipKind::kOther;
}

std::string NormalizedObject::attack_external_id() const {
    for (const auto& ref : external_refs) {
        if (ref.source_name == "mitre-attack" && !ref.external_id.empty())
            return ref.external_id;
    }
    return {};
}

nlohmann::json NormalizedObject::to_json() const {
    nlohmann::json out = raw_extras;
    out["type"] = type_raw;
    out["id"] = stix_id;
    if (name) out["name"] = *name;
    if (description) out["description"] = *description;
    if (created_raw) out["created"] = *created_raw;
    if (modified_raw) out["modified"] = *modified_raw;
    if (had_external_refs) {
        nlohmann::json refs = nlohmann::json::array();
        for (const auto& ref : external_refs) refs.push_back(ref.raw);
        out["external_references"] = std::move(refs);
    }
    if (had_kill_chain_phases) {
        nlohmann::json phases = nlohmann::json::array();
        for (const auto& phase : kill_chain_phases) phases.push_back(phase.raw);
        out["kill_chain_phases"] = std::move(phases);
    }
    if (revoked_raw) out["revoked"] = *revoked_raw;
    if (deprecated_raw) out["x_mitre_deprecated"] = *deprecated_raw;
    return out;
}

nlohmann::json RelationshipRecord::to_json() const {
    nlohmann::json out = raw_extras;
    out["type"] = "relationship";
    out["id"] = stix_id;
    out["relationship_type"] = relationship_type_raw;
    out["source_ref"] = source_ref;
    out["target_ref"] = target_ref;
    if (created_raw) out["created"] = *created_raw;
    if (modified_raw) out["modified"] = *modified_raw;
    return out;
}

}  // namespace ctigap::stix
