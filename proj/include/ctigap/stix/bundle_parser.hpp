#pragma once

#include <string_view>
#include <vector>

#include "ctigap/stix/types.hpp"

namespace ctigap::stix {

struct ParsedBundle {
    std::vector<NormalizedObject> objects;        // non-relationship objects
    std::vector<RelationshipRecord> relationships;
    std::vector<RejectedObject> rejects;

    std::size_t raw_object_count() const {
        return objects.size() + relationships.size() + rejects.size();
    }
};

// Parses a STIX 2.1 bundle document. Malformed JSON raises ParseError with
// the byte offset of the failure. Individual objects that lack required
// fields are recorded as rejects; the rest of the bundle still parses.
ParsedBundle parse_bundle(std::string_view text, std::string_view source_tag);

// Same, reading the document from disk. IoError on unreadable path.
ParsedBundle parse_bundle_file(const std::string& path, std::string_view source_tag);

// Normalizes a single non-relationship STIX object. Requires string "type"
// and "id" members; throws ParseError otherwise.
NormalizedObject normalize_object(nlohmann::json raw, std::string_view source_tag);

// Normalizes a single relationship object. Requires string "type", "id",
// "relationship_type", "source_ref", "target_ref"; throws ParseError otherwise.
RelationshipRecord normalize_relationship(nlohmann::json raw, std::string_view source_tag);

}  // namespace ctigap::stix
