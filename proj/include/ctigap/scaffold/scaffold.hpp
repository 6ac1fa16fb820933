#pragma once

#include <string>
#include <vector>

#include "ctigap/graph/matrix.hpp"

namespace ctigap::scaffold {

// Earliest canonical tactic of the technique, as a display name.
// DomainError when none of its tactics is recognized.
std::string assign_tactic(const graph::Technique& technique);

struct ScaffoldEntry {
    std::string attack_id;
    std::string tactic;  // assigned canonical display name
    int tactic_index = 0;
    std::size_t order_index = 0;
    std::string name;
    std::vector<std::string> provenance;  // technique + uses-relationship stix ids
};

// Tactic-ordered technique list for one entity. Entries are sorted by
// (canonical tactic index, technique number, sub-technique number); sorting
// is total and deterministic, so identical corpora produce identical
// scaffolds. Deliberately carries no timing fields: the order is an
// organizational backbone, not a timeline.
struct TacticScaffold {
    std::string entity_id;
    std::string entity_name;
    std::vector<ScaffoldEntry> entries;
    std::vector<std::string> unassignable;  // attack ids with no recognized tactic
};

// Builds the scaffold for a campaign or intrusion set resolved by `key`
// (external id or name). DomainError when the entity is unknown or uses no
// universe technique.
TacticScaffold build_scaffold(const graph::BehaviorGraph& graph,
                              const std::vector<graph::Technique>& universe,
                              std::string_view key);

nlohmann::json scaffold_to_json(const TacticScaffold& scaffold);
TacticScaffold scaffold_from_json(const nlohmann::json& doc);
std::string format_scaffold(const TacticScaffold& scaffold);

}  // namespace ctigap::scaffold
