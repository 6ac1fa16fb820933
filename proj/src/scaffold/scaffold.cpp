#include "ctigap/scaffold/scaffold.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "ctigap/attack/attack_id.hpp"
#include "ctigap/attack/tactics.hpp"
#include "ctigap/util/errors.hpp"

namespace ctigap::scaffold {
namespace {

int earliest_tactic_index(const graph::Technique& technique) {
    int best = attack::kTacticCount;
    for (const auto& name : technique.tactic_names)
        if (auto idx = attack::tactic_index(name); idx && *idx < best) best = *idx;
    return best;
}

}  // namespace

std::string assign_tactic(const graph::Technique& technique) {
    const int idx = earliest_tactic_index(technique);
    if (idx >= attack::kTacticCount)
        throw util::DomainError("technique " + technique.attack_id +
                                " has no recognized tactic");
    return std::string(attack::tactic_display_name(idx));
}

TacticScaffold build_scaffold(const graph::BehaviorGraph& graph,
                              const std::vector<graph::Technique>& universe,
                              std::string_view key) {
    const graph::Node* entity = graph.find_entity(graph::NodeKind::kCampaign, key);
    if (!entity) entity = graph.find_entity(graph::NodeKind::kIntrusionSet, key);
    if (!entity)
        throw util::DomainError("unknown campaign or intrusion set: " +
                                std::string(key));

    std::map<std::string, std::size_t> universe_by_stix;
    for (std::size_t i = 0; i < universe.size(); ++i)
        universe_by_stix.emplace(universe[i].stix_id, i);

    const std::size_t entity_index = graph.node_by_stix.at(entity->stix_id);
    // technique universe index -> uses-relationship stix ids
    std::map<std::size_t, std::vector<std::string>> used;
    for (const auto& edge : graph.edges) {
        if (edge.kind != stix::RelationshipKind::kUses) continue;
        if (edge.source != entity_index) continue;
        auto it = universe_by_stix.find(graph.nodes[edge.target].stix_id);
        if (it == universe_by_stix.end()) continue;
        used[it->second].push_back(edge.stix_id);
    }
    if (used.empty())
        throw util::DomainError("entity uses no technique in the universe: " +
                                std::string(key));

    TacticScaffold scaffold;
    scaffold.entity_id =
        entity->external_id.empty() ? entity->stix_id : entity->external_id;
    scaffold.entity_name = entity->name;

    struct Pending {
        int tactic_index;
        attack::ExternalIdKey id_key;
        const graph::Technique* technique;
        std::vector<std::string> relationship_ids;
    };
    std::vector<Pending> pending;
    for (auto& [universe_index, relationship_ids] : used) {
        const graph::Technique& technique = universe[universe_index];
        const int tactic_idx = earliest_tactic_index(technique);
        if (tactic_idx >= attack::kTacticCount) {
            scaffold.unassignable.push_back(technique.attack_id);
            continue;
        }
        std::sort(relationship_ids.begin(), relationship_ids.end());
        pending.push_back({tactic_idx, attack::external_id_key(technique.attack_id),
                           &technique, std::move(relationship_ids)});
    }
    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        if (a.tactic_index != b.tactic_index) return a.tactic_index < b.tactic_index;
        if (a.id_key < b.id_key) return true;
        if (b.id_key < a.id_key) return false;
        return a.technique->stix_id < b.technique->stix_id;
    });
    std::sort(scaffold.unassignable.begin(), scaffold.unassignable.end());

    for (std::size_t i = 0; i < pending.size(); ++i) {
        const Pending& p = pending[i];
        ScaffoldEntry entry;
        entry.attack_id = p.technique->attack_id;
        entry.tactic = std::string(attack::tactic_display_name(p.tactic_index));
        entry.tactic_index = p.tactic_index;
        entry.order_index = i;
        entry.name = p.technique->name;
        entry.provenance.push_back(p.technique->stix_id);
        entry.provenance.insert(entry.provenance.end(), p.relationship_ids.begin(),
                                p.relationship_ids.end());
        scaffold.entries.push_back(std::move(entry));
    }
    return scaffold;
}

nlohmann::json scaffold_to_json(const TacticScaffold& scaffold) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& entry : scaffold.entries)
        entries.push_back({{"attack_id", entry.attack_id},
                           {"tactic", entry.tactic},
                           {"order_index", entry.order_index},
                           {"name", entry.name},
                           {"provenance", entry.provenance}});
    return {{"entity_id", scaffold.entity_id},
            {"entity_name", scaffold.entity_name},
            {"entries", std::move(entries)},
            {"unassignable", scaffold.unassignable}};
}

TacticScaffold scaffold_from_json(const nlohmann::json& doc) {
    TacticScaffold scaffold;
    scaffold.entity_id = doc.at("entity_id").get<std::string>();
    scaffold.entity_name = doc.value("entity_name", "");
    for (const auto& raw : doc.at("entries")) {
        ScaffoldEntry entry;
        entry.attack_id = raw.at("attack_id").get<std::string>();
        entry.tactic = raw.at("tactic").get<std::string>();
        entry.order_index = raw.at("order_index").get<std::size_t>();
        entry.name = raw.value("name", "");
        for (const auto& p : raw.value("provenance", nlohmann::json::array()))
            entry.provenance.push_back(p.get<std::string>());
        if (auto idx = attack::tactic_index(entry.tactic))
            entry.tactic_index = *idx;
        scaffold.entries.push_back(std::move(entry));
    }
    for (const auto& u : doc.value("unassignable", nlohmann::json::array()))
        scaffold.unassignable.push_back(u.get<std::string>());
    return scaffold;
}

std::string format_scaffold(const TacticScaffold& scaffold) {
    std::string out = scaffold.entity_id;
    if (!scaffold.entity_name.empty() && scaffold.entity_name != scaffold.entity_id)
        out += " (" + scaffold.entity_name + ")";
    out += "\n";
    std::string last_tactic;
    for (const auto& entry : scaffold.entries) {
        if (entry.tactic != last_tactic) {
            out += entry.tactic + "\n";
            last_tactic = entry.tactic;
        }
        out += "  " + entry.attack_id;
        if (!entry.name.empty()) out += ": " + entry.name;
        out += "\n";
    }
    if (!scaffold.unassignable.empty()) {
        out += "Unassignable\n";
        for (const auto& id : scaffold.unassignable) out += "  " + id + "\n";
    }
    return out;
}

}  // namespace ctigap::scaffold
