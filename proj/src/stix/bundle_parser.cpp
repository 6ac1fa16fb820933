#include "ctigap/stix/bundle_parser.hpp"

#include <fstream>
#include <sstream>

#include "ctigap/util/errors.hpp"
#include "ctigap/util/time.hpp"

namespace ctigap::stix {
namespace {

std::optional<std::string> take_string(nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return std::nullopt;
    std::string value = it->get<std::string>();
    obj.erase(it);
    return value;
}

std::optional<bool> take_bool(nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_boolean()) return std::nullopt;
    bool value = it->get<bool>();
    obj.erase(it);
    return value;
}

std::int64_t ts_or_zero(const std::optional<std::string>& raw) {
    if (!raw) return 0;
    auto parsed = util::parse_rfc3339(*raw);
    return parsed ? *parsed : 0;
}

std::string require_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw util::ParseError(std::string("missing or non-string \"") + key + "\"", 0);
    return it->get<std::string>();
}

}  // namespace

NormalizedObject normalize_object(nlohmann::json raw, std::string_view source_tag) {
    if (!raw.is_object())
        throw util::ParseError("object entry is not a JSON object", 0);
    NormalizedObject obj;
    obj.type_raw = require_string(raw, "type");
    obj.stix_id = require_string(raw, "id");
    obj.object_type = object_kind_from_type(obj.type_raw);
    obj.source_tag = std::string(source_tag);
    raw.erase("type");
    raw.erase("id");
    obj.name = take_string(raw, "name");
    obj.description = take_string(raw, "description");
    obj.created_raw = take_string(raw, "created");
    obj.modified_raw = take_string(raw, "modified");
    obj.created_us = ts_or_zero(obj.created_raw);
    obj.modified_us = obj.modified_raw ? ts_or_zero(obj.modified_raw) : obj.created_us;

    if (auto it = raw.find("external_references"); it != raw.end() && it->is_array()) {
        obj.had_external_refs = true;
        for (auto& entry : *it) {
            ExternalRef ref;
            if (entry.is_object()) {
                if (auto f = entry.find("source_name"); f != entry.end() && f->is_string())
                    ref.source_name = f->get<std::string>();
                if (auto f = entry.find("external_id"); f != entry.end() && f->is_string())
                    ref.external_id = f->get<std::string>();
                if (auto f = entry.find("url"); f != entry.end() && f->is_string())
                    ref.url = f->get<std::string>();
            }
            ref.raw = std::move(entry);
            obj.external_refs.push_back(std::move(ref));
        }
        raw.erase(it);
    }

    if (auto it = raw.find("kill_chain_phases"); it != raw.end() && it->is_array()) {
        obj.had_kill_chain_phases = true;
        for (auto& entry : *it) {
            KillChainPhase phase;
            if (entry.is_object()) {
                if (auto f = entry.find("kill_chain_name"); f != entry.end() && f->is_string())
                    phase.kill_chain_name = f->get<std::string>();
                if (auto f = entry.find("phase_name"); f != entry.end() && f->is_string())
                    phase.phase_name = f->get<std::string>();
            }
            phase.raw = std::move(entry);
            obj.kill_chain_phases.push_back(std::move(phase));
        }
        raw.erase(it);
    }

    obj.revoked_raw = take_bool(raw, "revoked");
    obj.deprecated_raw = take_bool(raw, "x_mitre_deprecated");
    obj.revoked = obj.revoked_raw.value_or(false);
    obj.deprecated = obj.deprecated_raw.value_or(false);
    obj.raw_extras = std::move(raw);
    return obj;
}

RelationshipRecord normalize_relationship(nlohmann::json raw, std::string_view source_tag) {
    if (!raw.is_object())
        throw util::ParseError("relationship entry is not a JSON object", 0);
    RelationshipRecord rec;
    if (require_string(raw, "type") != "relationship")
        throw util::ParseError("not a relationship object", 0);
    rec.stix_id = require_string(raw, "id");
    rec.relationship_type_raw = require_string(raw, "relationship_type");
    rec.relationship_type = relationship_kind_from_type(rec.relationship_type_raw);
    rec.source_ref = require_string(raw, "source_ref");
    rec.target_ref = require_string(raw, "target_ref");
    rec.source_tag = std::string(source_tag);
    raw.erase("type");
    raw.erase("id");
    raw.erase("relationship_type");
    raw.erase("source_ref");
    raw.erase("target_ref");
    rec.created_raw = take_string(raw, "created");
    rec.modified_raw = take_string(raw, "modified");
    rec.modified_us =
        rec.modified_raw ? ts_or_zero(rec.modified_raw) : ts_or_zero(rec.created_raw);
    rec.raw_extras = std::move(raw);
    return rec;
}

ParsedBundle parse_bundle(std::string_view text, std::string_view source_tag) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw util::ParseError(e.what(), e.byte);
    }
    if (!doc.is_object())
        throw util::ParseError("bundle document is not a JSON object", 0);
    auto objects_it = doc.find("objects");
    if (objects_it == doc.end() || !objects_it->is_array())
        throw util::ParseError("bundle has no \"objects\" array", 0);

    ParsedBundle bundle;
    std::size_t index = 0;
    for (auto& raw : *objects_it) {
        const std::size_t i = index++;
        auto reject = [&](std::string reason) {
            bundle.rejects.push_back({i, std::move(reason), std::string(source_tag)});
        };
        if (!raw.is_object()) {
            reject("object entry is not a JSON object");
            continue;
        }
        auto type_it = raw.find("type");
        if (type_it == raw.end() || !type_it->is_string()) {
            reject("missing or non-string \"type\"");
            continue;
        }
        auto id_it = raw.find("id");
        if (id_it == raw.end() || !id_it->is_string()) {
            reject("missing or non-string \"id\"");
            continue;
        }

        if (type_it->get_ref<const std::string&>() == "relationship") {
            auto src = raw.find("source_ref");
            auto dst = raw.find("target_ref");
            auto rel = raw.find("relationship_type");
            if (src == raw.end() || !src->is_string() ||
                dst == raw.end() || !dst->is_string() ||
                rel == raw.end() || !rel->is_string()) {
                reject("relationship missing source_ref/target_ref/relationship_type");
                continue;
            }
            bundle.relationships.push_back(
                normalize_relationship(std::move(raw), source_tag));
        } else {
            bundle.objects.push_back(normalize_object(std::move(raw), source_tag));
        }
    }
    return bundle;
}

ParsedBundle parse_bundle_file(const std::string& path, std::string_view source_tag) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw util::IoError("cannot open bundle file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw util::IoError("error reading bundle file: " + path);
    return parse_bundle(buf.str(), source_tag);
}

}  // namespace ctigap::stix
