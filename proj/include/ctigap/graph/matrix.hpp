#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctigap/graph/behavior_graph.hpp"

namespace ctigap::graph {

enum class FilterPolicy {
    kDefault,  // drop revoked, deprecated, and no-mitre-attack-kill-chain
    kNone,     // every attack-pattern
};

std::optional<FilterPolicy> filter_policy_from_string(std::string_view name);

struct Technique {
    std::string attack_id;
    std::string name;
    std::vector<std::string> tactic_names;  // mitre-attack phase names, bundle order
    std::vector<std::string> platforms;
    bool is_subtechnique = false;
    std::optional<std::string> parent_attack_id;
    std::string stix_id;
};

// All techniques admitted by the policy, in the canonical deterministic
// order: earliest canonical tactic index, then numeric technique number,
// then sub-technique number; unassignable tactics sort last, ids that do
// not parse as Tdddd(.ddd) after those, by raw string.
std::vector<Technique> technique_universe(const BehaviorGraph& graph,
                                          FilterPolicy policy);

struct TechniqueMatrix {
    std::vector<std::string> row_ids;    // entity external ids, lexicographic
    std::vector<std::string> row_names;  // display names, parallel to row_ids
    std::vector<std::string> col_ids;    // technique attack_ids, universe order
    std::vector<std::vector<std::uint8_t>> cells;   // 0/1, rows × cols
    std::vector<std::string> excluded_rows;         // all-zero entities, reported

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return col_ids.size(); }
    std::size_t ones_count() const;
    // Accepts a row id or a row name.
    std::optional<std::size_t> row_index(std::string_view key) const;
};

// Binary presence matrix: cell(e,t) = 1 iff a uses edge links entity e
// directly to technique t. Entities whose row would be all zero are
// excluded and listed in excluded_rows.
TechniqueMatrix entity_technique_matrix(const BehaviorGraph& graph,
                                        NodeKind entity_kind,
                                        const std::vector<Technique>& universe);

// CSV with a header row of attack_ids; first column is the entity id.
std::string matrix_to_csv(const TechniqueMatrix& matrix);

nlohmann::json matrix_to_json(const TechniqueMatrix& matrix);

}  // namespace ctigap::graph
