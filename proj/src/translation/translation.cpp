#include "ctigap/translation/translation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ctigap::translation {
namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string joined_messages(const std::vector<ValidationIssue>& issues) {
    std::string out = "plan validation failed:";
    for (const auto& issue : issues) out += "\n  [" + issue.code + "] " + issue.message;
    return out;
}

}  // namespace

PlanValidationError::PlanValidationError(std::vector<ValidationIssue> issues)
    : util::DomainError(joined_messages(issues)), issues_(std::move(issues)) {}

std::string_view to_string(Platform p) {
    switch (p) {
        case Platform::kLinux: return "linux";
        case Platform::kWindows: return "windows";
        case Platform::kDarwin: return "darwin";
    }
    return "linux";
}

std::string_view to_string(Privilege p) {
    return p == Privilege::kElevated ? "elevated" : "user";
}

std::string_view to_string(AssumptionCategory c) {
    switch (c) {
        case AssumptionCategory::kPath: return "path";
        case AssumptionCategory::kHost: return "host";
        case AssumptionCategory::kCredential: return "credential";
        case AssumptionCategory::kPrivilege: return "privilege";
        case AssumptionCategory::kService: return "service";
        case AssumptionCategory::kOther: return "other";
    }
    return "other";
}

std::string_view to_string(MarkerReason r) {
    switch (r) {
        case MarkerReason::kPlatformAgnostic: return "platform-agnostic";
        case MarkerReason::kInsufficientDescription: return "insufficient-description";
        case MarkerReason::kEnvironmentUnavailable: return "environment-unavailable";
    }
    return "platform-agnostic";
}

std::optional<Platform> platform_from_string(std::string_view s) {
    if (s == "linux") return Platform::kLinux;
    if (s == "windows") return Platform::kWindows;
    if (s == "darwin") return Platform::kDarwin;
    return std::nullopt;
}

std::optional<Privilege> privilege_from_string(std::string_view s) {
    if (s == "user") return Privilege::kUser;
    if (s == "elevated") return Privilege::kElevated;
    return std::nullopt;
}

std::optional<AssumptionCategory> assumption_category_from_string(std::string_view s) {
    if (s == "path") return AssumptionCategory::kPath;
    if (s == "host") return AssumptionCategory::kHost;
    if (s == "credential") return AssumptionCategory::kCredential;
    if (s == "privilege") return AssumptionCategory::kPrivilege;
    if (s == "service") return AssumptionCategory::kService;
    if (s == "other") return AssumptionCategory::kOther;
    return std::nullopt;
}

std::optional<MarkerReason> marker_reason_from_string(std::string_view s) {
    if (s == "platform-agnostic") return MarkerReason::kPlatformAgnostic;
    if (s == "insufficient-description") return MarkerReason::kInsufficientDescription;
    if (s == "environment-unavailable") return MarkerReason::kEnvironmentUnavailable;
    return std::nullopt;
}

std::vector<std::string> extract_placeholders(std::string_view text) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        if (i > 0 && text[i - 1] == '$') continue;  // shell ${...} is literal
        std::size_t j = i + 1;
        if (j >= text.size() || !is_name_start(text[j])) continue;
        while (j < text.size() && is_name_char(text[j])) ++j;
        if (j < text.size() && text[j] == '}') {
            names.insert(std::string(text.substr(i + 1, j - i - 1)));
            i = j;
        }
    }
    return {names.begin(), names.end()};
}

namespace {

void emit_step(YAML::Emitter& out, const ExecutableStep& step) {
    out << YAML::BeginMap;
    out << YAML::Key << "attack_id" << YAML::Value << step.attack_id;
    out << YAML::Key << "tactic" << YAML::Value << step.tactic;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << step.name;
    out << YAML::Key << "platform" << YAML::Value
        << std::string(to_string(step.platform));
    out << YAML::Key << "executor_kind" << YAML::Value << step.executor_kind;
    out << YAML::Key << "privilege" << YAML::Value
        << std::string(to_string(step.privilege));
    out << YAML::Key << "command_template" << YAML::Value << YAML::DoubleQuoted
        << step.command_template;
    if (!step.cleanup_template.empty())
        out << YAML::Key << "cleanup_template" << YAML::Value << YAML::DoubleQuoted
            << step.cleanup_template;
    if (!step.parameters.empty()) {
        out << YAML::Key << "parameters" << YAML::Value << YAML::BeginSeq;
        for (const auto& p : step.parameters) {
            out << YAML::BeginMap;
            out << YAML::Key << "name" << YAML::Value << p.name;
            out << YAML::Key << "value" << YAML::Value << YAML::DoubleQuoted << p.value;
            if (!p.provenance.empty())
                out << YAML::Key << "provenance" << YAML::Value << YAML::DoubleQuoted
                    << p.provenance;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    if (!step.assumptions.empty()) {
        out << YAML::Key << "assumptions" << YAML::Value << YAML::BeginSeq;
        for (const auto& a : step.assumptions) {
            out << YAML::BeginMap;
            out << YAML::Key << "category" << YAML::Value
                << std::string(to_string(a.category));
            out << YAML::Key << "text" << YAML::Value << YAML::DoubleQuoted << a.text;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::Key << "provenance" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : step.provenance) out << p;
    out << YAML::EndSeq;
    out << YAML::EndMap;
}

std::string node_scalar(const YAML::Node& node) {
    if (!node || node.IsNull()) return {};
    return node.as<std::string>();
}

void require_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                  const std::string& context) {
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key))
            throw util::DomainError("unknown field \"" + key + "\" in " + context);
    }
}

ExecutableStep parse_step(const YAML::Node& node, std::size_t index) {
    const std::string label =
        "step #" + std::to_string(index + 1) +
        (node["attack_id"] ? " (" + node_scalar(node["attack_id"]) + ")" : "");
    if (!node.IsMap()) throw util::DomainError(label + " is not a map");
    require_keys(node,
                 {"attack_id", "tactic", "name", "command_template", "platform",
                  "executor_kind", "privilege", "parameters", "assumptions",
                  "cleanup_template", "provenance"},
                 label);

    ExecutableStep step;
    step.attack_id = node_scalar(node["attack_id"]);
    if (step.attack_id.empty())
        throw util::DomainError(label + " has no attack_id");
    step.tactic = node_scalar(node["tactic"]);
    step.name = node_scalar(node["name"]);
    step.command_template = node_scalar(node["command_template"]);
    if (step.command_template.empty())
        throw util::DomainError(label +
                                " has an empty command_template; use a marker entry "
                                "for untranslatable techniques");
    const std::string platform = node_scalar(node["platform"]);
    if (auto p = platform_from_string(platform)) {
        step.platform = *p;
    } else {
        throw util::DomainError(label + " has invalid platform \"" + platform +
                                "\" (expected linux|windows|darwin)");
    }
    step.executor_kind = node_scalar(node["executor_kind"]);
    if (step.executor_kind.empty())
        throw util::DomainError(label + " has no executor_kind");
    const std::string privilege = node_scalar(node["privilege"]);
    if (auto p = privilege_from_string(privilege)) {
        step.privilege = *p;
    } else {
        throw util::DomainError(label + " has invalid privilege \"" + privilege +
                                "\" (expected user|elevated)");
    }
    step.cleanup_template = node_scalar(node["cleanup_template"]);

    if (const auto& params = node["parameters"]) {
        if (!params.IsSequence() && !params.IsNull())
            throw util::DomainError(label + ": parameters must be a sequence");
        for (const auto& entry : params) {
            require_keys(entry, {"name", "value", "provenance"},
                         "a parameter of " + label);
            Parameter p;
            p.name = node_scalar(entry["name"]);
            p.value = node_scalar(entry["value"]);
            p.provenance = node_scalar(entry["provenance"]);
            if (p.name.empty())
                throw util::DomainError(label + " has a parameter without a name");
            step.parameters.push_back(std::move(p));
        }
    }
    if (const auto& assumptions = node["assumptions"]) {
        if (!assumptions.IsSequence() && !assumptions.IsNull())
            throw util::DomainError(label + ": assumptions must be a sequence");
        for (const auto& entry : assumptions) {
            require_keys(entry, {"category", "text"}, "an assumption of " + label);
            Assumption a;
            const std::string category = node_scalar(entry["category"]);
            if (auto c = assumption_category_from_string(category)) {
                a.category = *c;
            } else {
                throw util::DomainError(
                    label + " has invalid assumption category \"" + category +
                    "\" (expected path|host|credential|privilege|service|other)");
            }
            a.text = node_scalar(entry["text"]);
            step.assumptions.push_back(std::move(a));
        }
    }
    if (const auto& provenance = node["provenance"]) {
        if (!provenance.IsSequence() && !provenance.IsNull())
            throw util::DomainError(label + ": provenance must be a sequence");
        for (const auto& entry : provenance)
            step.provenance.push_back(entry.as<std::string>());
    }
    if (step.provenance.empty())
        throw util::DomainError(label + " has no provenance; every step must trace "
                                        "to at least one intelligence source");

    // Placeholder binding: every {name} in the templates must be bound by
    // exactly one parameter.
    std::set<std::string> bound;
    for (const auto& p : step.parameters) {
        if (!bound.insert(p.name).second)
            throw util::DomainError(label + " binds parameter \"" + p.name +
                                    "\" more than once");
    }
    std::string templates = step.command_template;
    templates += ' ';
    templates += step.cleanup_template;
    for (const auto& placeholder : extract_placeholders(templates)) {
        if (!bound.count(placeholder))
            throw util::DomainError(label + " has unbound placeholder {" +
                                    placeholder + "}");
    }
    return step;
}

UntranslatableMarker parse_marker(const YAML::Node& node, std::size_t index) {
    const std::string label = "marker #" + std::to_string(index + 1);
    if (!node.IsMap()) throw util::DomainError(label + " is not a map");
    require_keys(node, {"attack_id", "reason", "note"}, label);
    UntranslatableMarker marker;
    marker.attack_id = node_scalar(node["attack_id"]);
    if (marker.attack_id.empty())
        throw util::DomainError(label + " has no attack_id");
    const std::string reason = node_scalar(node["reason"]);
    if (auto r = marker_reason_from_string(reason)) {
        marker.reason = *r;
    } else {
        throw util::DomainError(label + " (" + marker.attack_id +
                                ") has invalid reason \"" + reason +
                                "\" (expected platform-agnostic|"
                                "insufficient-description|environment-unavailable)");
    }
    marker.note = node_scalar(node["note"]);
    return marker;
}

}  // namespace

std::string template_from_scaffold(const scaffold::TacticScaffold& scaffold) {
    TranslationDocument doc;
    doc.entity_id = scaffold.entity_id;
    for (const auto& entry : scaffold.entries) {
        ExecutableStep step;
        step.attack_id = entry.attack_id;
        step.tactic = entry.tactic;
        step.name = entry.name;
        step.executor_kind = "sh";
        step.provenance = entry.provenance;
        doc.steps.push_back(std::move(step));
    }
    return serialize_document(doc);
}

TranslationDocument load_steps(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw util::ParseError(e.what(),
                               e.mark.pos >= 0 ? static_cast<std::size_t>(e.mark.pos) : 0);
    }
    if (!root.IsMap())
        throw util::DomainError("translation document must be a YAML map");
    require_keys(root, {"entity_id", "steps", "markers"}, "the document root");

    TranslationDocument doc;
    doc.entity_id = node_scalar(root["entity_id"]);
    if (doc.entity_id.empty())
        throw util::DomainError("translation document has no entity_id");
    if (const auto& steps = root["steps"]) {
        if (!steps.IsSequence() && !steps.IsNull())
            throw util::DomainError("steps must be a sequence");
        std::size_t i = 0;
        for (const auto& node : steps) doc.steps.push_back(parse_step(node, i++));
    }
    if (const auto& markers = root["markers"]) {
        if (!markers.IsSequence() && !markers.IsNull())
            throw util::DomainError("markers must be a sequence");
        std::size_t i = 0;
        for (const auto& node : markers)
            doc.markers.push_back(parse_marker(node, i++));
    }
    return doc;
}

TranslationDocument load_steps_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw util::IoError("cannot open translation document: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_steps(buf.str());
}

std::string serialize_document(const TranslationDocument& doc) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "entity_id" << YAML::Value << doc.entity_id;
    out << YAML::Key << "steps" << YAML::Value;
    if (doc.steps.empty()) {
        out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
    } else {
        out << YAML::BeginSeq;
        for (const auto& step : doc.steps) emit_step(out, step);
        out << YAML::EndSeq;
    }
    if (!doc.markers.empty()) {
        out << YAML::Key << "markers" << YAML::Value << YAML::BeginSeq;
        for (const auto& marker : doc.markers) {
            out << YAML::BeginMap;
            out << YAML::Key << "attack_id" << YAML::Value << marker.attack_id;
            out << YAML::Key << "reason" << YAML::Value
                << std::string(to_string(marker.reason));
            if (!marker.note.empty())
                out << YAML::Key << "note" << YAML::Value << YAML::DoubleQuoted
                    << marker.note;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

EmulationPlan validate_plan(const scaffold::TacticScaffold& scaffold,
                            const TranslationDocument& doc) {
    std::vector<ValidationIssue> issues;
    if (!doc.entity_id.empty() && doc.entity_id != scaffold.entity_id)
        issues.push_back({"entity-mismatch",
                          "document is for " + doc.entity_id + " but scaffold is for " +
                              scaffold.entity_id});

    std::map<std::string, std::size_t> scaffold_pos;
    for (std::size_t i = 0; i < scaffold.entries.size(); ++i)
        scaffold_pos.emplace(scaffold.entries[i].attack_id, i);

    std::map<std::string, std::size_t> seen;
    for (const auto& step : doc.steps) ++seen[step.attack_id];
    for (const auto& marker : doc.markers) ++seen[marker.attack_id];
    for (const auto& [id, count] : seen)
        if (count > 1)
            issues.push_back({"duplicate", "technique " + id + " appears " +
                                               std::to_string(count) + " times"});
    for (const auto& entry : scaffold.entries)
        if (!seen.count(entry.attack_id))
            issues.push_back({"uncovered", "uncovered technique " + entry.attack_id});
    for (const auto& [id, count] : seen)
        if (!scaffold_pos.count(id))
            issues.push_back({"surplus", "surplus technique " + id +
                                             " not in the scaffold"});

    long last = -1;
    for (const auto& step : doc.steps) {
        auto it = scaffold_pos.find(step.attack_id);
        if (it == scaffold_pos.end()) continue;
        if (static_cast<long>(it->second) < last) {
            issues.push_back({"order", "step " + step.attack_id +
                                           " is out of scaffold order"});
        }
        last = static_cast<long>(it->second);
    }

    for (const auto& step : doc.steps)
        for (const auto& p : step.parameters)
            if (p.value.empty())
                issues.push_back({"empty-parameter",
                                  "step " + step.attack_id + " parameter \"" + p.name +
                                      "\" has an empty value"});

    if (!issues.empty()) throw PlanValidationError(std::move(issues));

    EmulationPlan plan;
    plan.entity_id = scaffold.entity_id;
    plan.steps = doc.steps;
    plan.markers = doc.markers;
    std::set<std::pair<int, std::string>> ledger;
    for (const auto& step : doc.steps)
        for (const auto& a : step.assumptions)
            ledger.emplace(static_cast<int>(a.category), a.text);
    for (const auto& [category, text] : ledger)
        plan.assumption_ledger.push_back(
            {static_cast<AssumptionCategory>(category), text});
    return plan;
}

nlohmann::json plan_to_json(const EmulationPlan& plan) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : plan.steps) {
        nlohmann::json parameters = nlohmann::json::array();
        for (const auto& p : step.parameters)
            parameters.push_back({{"name", p.name},
                                  {"value", p.value},
                                  {"provenance", p.provenance}});
        nlohmann::json assumptions = nlohmann::json::array();
        for (const auto& a : step.assumptions)
            assumptions.push_back(
                {{"category", std::string(to_string(a.category))}, {"text", a.text}});
        steps.push_back({{"attack_id", step.attack_id},
                         {"tactic", step.tactic},
                         {"name", step.name},
                         {"command_template", step.command_template},
                         {"platform", std::string(to_string(step.platform))},
                         {"executor_kind", step.executor_kind},
                         {"privilege", std::string(to_string(step.privilege))},
                         {"parameters", std::move(parameters)},
                         {"assumptions", std::move(assumptions)},
                         {"cleanup_template", step.cleanup_template},
                         {"provenance", step.provenance}});
    }
    nlohmann::json markers = nlohmann::json::array();
    for (const auto& marker : plan.markers)
        markers.push_back({{"attack_id", marker.attack_id},
                           {"reason", std::string(to_string(marker.reason))},
                           {"note", marker.note}});
    nlohmann::json ledger = nlohmann::json::array();
    for (const auto& a : plan.assumption_ledger)
        ledger.push_back(
            {{"category", std::string(to_string(a.category))}, {"text", a.text}});
    return {{"entity_id", plan.entity_id},
            {"steps", std::move(steps)},
            {"markers", std::move(markers)},
            {"assumption_ledger", std::move(ledger)}};
}

EmulationPlan plan_from_json(const nlohmann::json& doc) {
    EmulationPlan plan;
    plan.entity_id = doc.at("entity_id").get<std::string>();
    for (const auto& raw : doc.at("steps")) {
        ExecutableStep step;
        step.attack_id = raw.at("attack_id").get<std::string>();
        step.tactic = raw.value("tactic", "");
        step.name = raw.value("name", "");
        step.command_template = raw.at("command_template").get<std::string>();
        if (auto p = platform_from_string(raw.value("platform", "linux")))
            step.platform = *p;
        step.executor_kind = raw.value("executor_kind", "sh");
        if (auto p = privilege_from_string(raw.value("privilege", "user")))
            step.privilege = *p;
        for (const auto& entry : raw.value("parameters", nlohmann::json::array()))
            step.parameters.push_back({entry.at("name").get<std::string>(),
                                       entry.at("value").get<std::string>(),
                                       entry.value("provenance", "")});
        for (const auto& entry : raw.value("assumptions", nlohmann::json::array())) {
            Assumption a;
            if (auto c = assumption_category_from_string(
                    entry.value("category", "other")))
                a.category = *c;
            a.text = entry.value("text", "");
            step.assumptions.push_back(std::move(a));
        }
        step.cleanup_template = raw.value("cleanup_template", "");
        for (const auto& p : raw.value("provenance", nlohmann::json::array()))
            step.provenance.push_back(p.get<std::string>());
        plan.steps.push_back(std::move(step));
    }
    for (const auto& raw : doc.value("markers", nlohmann::json::array())) {
        UntranslatableMarker marker;
        marker.attack_id = raw.at("attack_id").get<std::string>();
        if (auto r = marker_reason_from_string(raw.value("reason", "")))
            marker.reason = *r;
        marker.note = raw.value("note", "");
        plan.markers.push_back(std::move(marker));
    }
    for (const auto& raw : doc.value("assumption_ledger", nlohmann::json::array())) {
        Assumption a;
        if (auto c = assumption_category_from_string(raw.value("category", "other")))
            a.category = *c;
        a.text = raw.value("text", "");
        plan.assumption_ledger.push_back(std::move(a));
    }
    return plan;
}

}  // namespace ctigap::translation
