#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctigap/scaffold/scaffold.hpp"
#include "ctigap/util/errors.hpp"

namespace ctigap::translation {

enum class Platform { kLinux, kWindows, kDarwin };
enum class Privilege { kUser, kElevated };
enum class AssumptionCategory { kPath, kHost, kCredential, kPrivilege, kService, kOther };
enum class MarkerReason {
    kPlatformAgnostic,
    kInsufficientDescription,
    kEnvironmentUnavailable,
};

std::string_view to_string(Platform p);
std::string_view to_string(Privilege p);
std::string_view to_string(AssumptionCategory c);
std::string_view to_string(MarkerReason r);
std::optional<Platform> platform_from_string(std::string_view s);
std::optional<Privilege> privilege_from_string(std::string_view s);
std::optional<AssumptionCategory> assumption_category_from_string(std::string_view s);
std::optional<MarkerReason> marker_reason_from_string(std::string_view s);

struct Parameter {
    std::string name;
    std::string value;
    std::string provenance;
    bool operator==(const Parameter&) const = default;
};

struct Assumption {
    AssumptionCategory category = AssumptionCategory::kOther;
    std::string text;
    bool operator==(const Assumption&) const = default;
};

struct ExecutableStep {
    std::string attack_id;
    std::string tactic;
    std::string name;
    std::string command_template;
    Platform platform = Platform::kLinux;
    std::string executor_kind;  // shell flavor label, e.g. sh / psh / cmd
    Privilege privilege = Privilege::kUser;
    std::vector<Parameter> parameters;
    std::vector<Assumption> assumptions;
    std::string cleanup_template;  // empty = no cleanup
    std::vector<std::string> provenance;
    bool operator==(const ExecutableStep&) const = default;
};

struct UntranslatableMarker {
    std::string attack_id;
    MarkerReason reason = MarkerReason::kPlatformAgnostic;
    std::string note;
    bool operator==(const UntranslatableMarker&) const = default;
};

struct TranslationDocument {
    std::string entity_id;
    std::vector<ExecutableStep> steps;
    std::vector<UntranslatableMarker> markers;
    bool operator==(const TranslationDocument&) const = default;
};

struct EmulationPlan {
    std::string entity_id;
    std::vector<ExecutableStep> steps;      // in scaffold order
    std::vector<UntranslatableMarker> markers;
    std::vector<Assumption> assumption_ledger;  // deduplicated, sorted
};

struct ValidationIssue {
    std::string code;  // uncovered / surplus / order / duplicate / ...
    std::string message;
};

// Carries the full issue list; a plan is never returned partially valid.
class PlanValidationError : public util::DomainError {
public:
    explicit PlanValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

// Distinct placeholder names in template text, sorted. A placeholder is
// {name} where name is [A-Za-z_][A-Za-z0-9_]* and the brace is not part of
// a shell ${...} expansion.
std::vector<std::string> extract_placeholders(std::string_view text);

// Editable YAML stub document: one empty-command step per scaffold entry,
// provenance prefilled from the scaffold. Not loadable until the analyst
// fills in commands or converts entries to markers.
std::string template_from_scaffold(const scaffold::TacticScaffold& scaffold);

// Strict parse of a translation document. Unknown keys, unbound or
// duplicate placeholders, bad enum values, empty commands, and missing
// provenance are all hard errors (DomainError); malformed YAML is a
// ParseError.
TranslationDocument load_steps(const std::string& yaml_text);
TranslationDocument load_steps_file(const std::string& path);

// Deterministic YAML serialization; load_steps(serialize_document(d)) == d
// for any valid document.
std::string serialize_document(const TranslationDocument& doc);

// Checks the document against the scaffold (coverage, order, duplicates,
// non-empty parameter values) and builds the consolidated assumption
// ledger. Throws PlanValidationError listing every violation.
EmulationPlan validate_plan(const scaffold::TacticScaffold& scaffold,
                            const TranslationDocument& doc);

nlohmann::json plan_to_json(const EmulationPlan& plan);
EmulationPlan plan_from_json(const nlohmann::json& doc);

}  // namespace ctigap::translation
