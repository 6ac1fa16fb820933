#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctigap/stix/corpus.hpp"

namespace ctigap::graph {

enum class NodeKind {
    kTechnique,
    kTactic,
    kCampaign,
    kIntrusionSet,
    kMalware,
    kTool,
    kCourseOfAction,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_object(stix::ObjectKind kind);

struct Node {
    std::string stix_id;
    NodeKind kind;
    std::string name;
    std::string external_id;   // ATT&CK id (Tdddd, Cdddd, Gdddd, ...) or empty
    std::size_t object_index;  // into the backing corpus's objects vector
};

struct Edge {
    std::size_t source;  // node index
    std::size_t target;  // node index
    stix::RelationshipKind kind;
    std::string relationship_type_raw;
    std::string stix_id;
};

// A relationship that could not become an edge. Kept for accounting:
// edges + quarantined always equals the corpus relationship count.
struct QuarantinedEdge {
    std::size_t relationship_index;  // into the backing corpus
    std::string reason;
};

// Typed graph over behavioral entities. Holds a pointer to the corpus it
// was built from; the corpus must outlive the graph.
struct BehaviorGraph {
    const stix::Corpus* corpus = nullptr;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<QuarantinedEdge> quarantined;
    std::unordered_map<std::string, std::size_t> node_by_stix;

    const Node* find_by_stix(std::string_view stix_id) const;

    // Resolves an entity by ATT&CK external id, exact name, or (as a last
    // resort) unique case-insensitive name.
    const Node* find_entity(NodeKind kind, std::string_view key) const;

    const stix::NormalizedObject& object_of(const Node& node) const {
        return corpus->objects[node.object_index];
    }
};

// Builds the typed graph from a deduplicated corpus: behavioral SDOs become
// nodes, relationships among them become edges, everything else is
// quarantined (never silently dropped).
BehaviorGraph build_graph(const stix::Corpus& corpus);

struct Attribution {
    std::string campaign_id;  // external id, stix id fallback
    std::string group_id;
    std::string campaign_name;
    std::string group_name;
};

// One pair per attributed-to edge from a campaign to an intrusion set,
// sorted by (campaign_id, group_id).
std::vector<Attribution> campaign_group_attributions(const BehaviorGraph& graph);

// Structured node/edge/quarantine report for inspection.
nlohmann::json graph_to_json(const BehaviorGraph& graph);

}  // namespace ctigap::graph
