#include "ctigap/caldera/export.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include <yaml-cpp/yaml.h>

#include "ctigap/attack/tactics.hpp"
#include "ctigap/util/errors.hpp"
#include "ctigap/util/uuid.hpp"

namespace ctigap::caldera {
namespace {

// Substitutes {name} placeholders with bound parameter values; `${...}`
// shell expansions pass through untouched (same rule as the translation
// layer's placeholder scan).
std::string substitute(std::string_view text,
                       const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{' || (i > 0 && text[i - 1] == '$')) {
            out.push_back(text[i]);
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && text[j] != '}' && text[j] != '{') ++j;
        if (j < text.size() && text[j] == '}') {
            auto it = values.find(std::string(text.substr(i + 1, j - i - 1)));
            if (it != values.end()) {
                out += it->second;
                i = j;
                continue;
            }
        }
        out.push_back(text[i]);
    }
    return out;
}

// Caldera uses kebab-case tactic labels.
std::string kebab_tactic(const std::string& display_name) {
    if (auto idx = attack::tactic_index(display_name))
        return std::string(attack::tactic_phase_name(*idx));
    std::string out;
    for (char c : display_name)
        out.push_back(c == ' ' ? '-' : static_cast<char>(std::tolower(
                                           static_cast<unsigned char>(c))));
    return out;
}

std::string describe(const translation::ExecutableStep& step) {
    std::string out = "Derived from: ";
    for (std::size_t i = 0; i < step.provenance.size(); ++i) {
        if (i) out += ", ";
        out += step.provenance[i];
    }
    out += '.';
    if (!step.assumptions.empty()) {
        out += " Assumes:";
        for (const auto& a : step.assumptions) {
            out += " [" + std::string(translation::to_string(a.category)) + "] " +
                   a.text + ';';
        }
        out.back() = '.';
    }
    return out;
}

}  // namespace

std::string ability_uuid(const std::string& entity_id, const std::string& attack_id) {
    return util::uuid5(util::artifact_namespace(), entity_id + ":" + attack_id)
        .to_string();
}

std::string adversary_uuid(const std::string& entity_id) {
    return util::uuid5(util::artifact_namespace(), entity_id + ":adversary")
        .to_string();
}

std::vector<CalderaAbility> to_abilities(const translation::EmulationPlan& plan) {
    std::vector<CalderaAbility> abilities;
    abilities.reserve(plan.steps.size());
    for (const auto& step : plan.steps) {
        std::map<std::string, std::string> values;
        for (const auto& p : step.parameters) values.emplace(p.name, p.value);

        CalderaAbility ability;
        ability.ability_id = ability_uuid(plan.entity_id, step.attack_id);
        ability.name = step.name.empty() ? step.attack_id : step.name;
        ability.description = describe(step);
        ability.tactic = kebab_tactic(step.tactic);
        ability.technique_id = step.attack_id;
        ability.technique_name = step.name;
        Executor executor;
        executor.platform = std::string(translation::to_string(step.platform));
        executor.name = step.executor_kind;
        executor.command = substitute(step.command_template, values);
        executor.cleanup = substitute(step.cleanup_template, values);
        ability.executors.push_back(std::move(executor));
        abilities.push_back(std::move(ability));
    }
    return abilities;
}

CalderaAdversary to_adversary(const translation::EmulationPlan& plan,
                              const std::vector<CalderaAbility>& abilities) {
    if (abilities.size() != plan.steps.size())
        throw util::DomainError("ability list does not match the plan step count");
    CalderaAdversary adversary;
    adversary.adversary_id = adversary_uuid(plan.entity_id);
    adversary.name = plan.entity_id;
    adversary.description =
        "Technique sequence for " + plan.entity_id + " (" +
        std::to_string(plan.steps.size()) + " steps)";
    // Ordering comes from the plan, not from the ability list's order.
    std::map<std::string, std::string> ability_by_technique;
    for (const auto& ability : abilities) {
        if (!ability_by_technique.emplace(ability.technique_id, ability.ability_id)
                 .second)
            throw util::DomainError("duplicate ability for technique " +
                                    ability.technique_id);
    }
    for (const auto& step : plan.steps) {
        auto it = ability_by_technique.find(step.attack_id);
        if (it == ability_by_technique.end())
            throw util::DomainError("no ability for plan step " + step.attack_id);
        adversary.atomic_ordering.push_back(it->second);
    }
    return adversary;
}

std::string ability_to_yaml(const CalderaAbility& ability) {
    YAML::Emitter out;
    out << YAML::BeginSeq << YAML::BeginMap;
    out << YAML::Key << "ability_id" << YAML::Value << ability.ability_id;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << ability.name;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted
        << ability.description;
    out << YAML::Key << "tactic" << YAML::Value << ability.tactic;
    out << YAML::Key << "technique_id" << YAML::Value << ability.technique_id;
    out << YAML::Key << "technique_name" << YAML::Value << YAML::DoubleQuoted
        << ability.technique_name;
    out << YAML::Key << "executors" << YAML::Value << YAML::BeginSeq;
    for (const auto& executor : ability.executors) {
        out << YAML::BeginMap;
        out << YAML::Key << "platform" << YAML::Value << executor.platform;
        out << YAML::Key << "name" << YAML::Value << executor.name;
        out << YAML::Key << "command" << YAML::Value << YAML::DoubleQuoted
            << executor.command;
        out << YAML::Key << "cleanup" << YAML::Value << YAML::DoubleQuoted
            << executor.cleanup;
        out << YAML::Key << "timeout" << YAML::Value << executor.timeout_s;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap << YAML::EndSeq;
    return std::string(out.c_str()) + "\n";
}

std::string adversary_to_yaml(const CalderaAdversary& adversary) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "adversary_id" << YAML::Value << adversary.adversary_id;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << adversary.name;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted
        << adversary.description;
    out << YAML::Key << "atomic_ordering" << YAML::Value << YAML::BeginSeq;
    for (const auto& id : adversary.atomic_ordering) out << id;
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

CalderaAbility ability_from_yaml(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw util::ParseError(e.what(), 0);
    }
    if (!root.IsSequence() || root.size() != 1 || !root[0].IsMap())
        throw util::ParseError("ability file must be a single-element list", 0);
    const YAML::Node& node = root[0];
    CalderaAbility ability;
    ability.ability_id = node["ability_id"].as<std::string>("");
    ability.name = node["name"].as<std::string>("");
    ability.description = node["description"].as<std::string>("");
    ability.tactic = node["tactic"].as<std::string>("");
    ability.technique_id = node["technique_id"].as<std::string>("");
    ability.technique_name = node["technique_name"].as<std::string>("");
    for (const auto& e : node["executors"]) {
        Executor executor;
        executor.platform = e["platform"].as<std::string>("");
        executor.name = e["name"].as<std::string>("");
        executor.command = e["command"].as<std::string>("");
        executor.cleanup = e["cleanup"].as<std::string>("");
        executor.timeout_s = e["timeout"].as<int>(60);
        ability.executors.push_back(std::move(executor));
    }
    return ability;
}

CalderaAdversary adversary_from_yaml(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw util::ParseError(e.what(), 0);
    }
    if (!root.IsMap()) throw util::ParseError("adversary file must be a map", 0);
    CalderaAdversary adversary;
    adversary.adversary_id = root["adversary_id"].as<std::string>("");
    adversary.name = root["name"].as<std::string>("");
    adversary.description = root["description"].as<std::string>("");
    for (const auto& id : root["atomic_ordering"])
        adversary.atomic_ordering.push_back(id.as<std::string>());
    return adversary;
}

std::vector<std::string> serialize_artifacts(
    const std::vector<CalderaAbility>& abilities, const CalderaAdversary& adversary,
    const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    auto write_file = [&](const fs::path& relative, const std::string& content) {
        const fs::path full = fs::path(out_dir) / relative;
        std::error_code ec;
        fs::create_directories(full.parent_path(), ec);
        if (ec)
            throw util::IoError("cannot create directory " +
                                full.parent_path().string() + ": " + ec.message());
        std::ofstream out(full, std::ios::binary);
        if (!out) throw util::IoError("cannot write " + full.string());
        out << content;
        if (!out) throw util::IoError("error writing " + full.string());
        written.push_back(relative.generic_string());
    };
    for (const auto& ability : abilities)
        write_file(fs::path("abilities") / ability.tactic /
                       (ability.ability_id + ".yml"),
                   ability_to_yaml(ability));
    write_file(fs::path("adversaries") / (adversary.adversary_id + ".yml"),
               adversary_to_yaml(adversary));
    return written;
}

std::string_view to_string(OperationState state) {
    switch (state) {
        case OperationState::kCreated: return "created";
        case OperationState::kRunning: return "running";
        case OperationState::kFinished: return "finished";
        case OperationState::kFailed: return "failed";
    }
    return "created";
}

}  // namespace ctigap::caldera
