#include "ctigap/graph/behavior_graph.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace ctigap::graph {
namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::kTechnique: return "technique";
        case NodeKind::kTactic: return "tactic";
        case NodeKind::kCampaign: return "campaign";
        case NodeKind::kIntrusionSet: return "intrusion_set";
        case NodeKind::kMalware: return "malware";
        case NodeKind::kTool: return "tool";
        case NodeKind::kCourseOfAction: return "course_of_action";
    }
    return "unknown";
}

std::optional<NodeKind> node_kind_from_object(stix::ObjectKind kind) {
    switch (kind) {
        case stix::ObjectKind::kAttackPattern: return NodeKind::kTechnique;
        case stix::ObjectKind::kTactic: return NodeKind::kTactic;
        case stix::ObjectKind::kCampaign: return NodeKind::kCampaign;
        case stix::ObjectKind::kIntrusionSet: return NodeKind::kIntrusionSet;
        case stix::ObjectKind::kMalware: return NodeKind::kMalware;
        case stix::ObjectKind::kTool: return NodeKind::kTool;
        case stix::ObjectKind::kCourseOfAction: return NodeKind::kCourseOfAction;
        default: return std::nullopt;
    }
}

const Node* BehaviorGraph::find_by_stix(std::string_view stix_id) const {
    auto it = node_by_stix.find(std::string(stix_id));
    return it == node_by_stix.end() ? nullptr : &nodes[it->second];
}

const Node* BehaviorGraph::find_entity(NodeKind kind, std::string_view key) const {
    for (const auto& node : nodes)
        if (node.kind == kind && !node.external_id.empty() && node.external_id == key)
            return &node;
    for (const auto& node : nodes)
        if (node.kind == kind && node.name == key) return &node;
    const std::string folded = to_lower(key);
    const Node* match = nullptr;
    for (const auto& node : nodes) {
        if (node.kind != kind || to_lower(node.name) != folded) continue;
        if (match) return nullptr;  // ambiguous
        match = &node;
    }
    return match;
}

BehaviorGraph build_graph(const stix::Corpus& corpus) {
    BehaviorGraph graph;
    graph.corpus = &corpus;
    std::unordered_set<std::string> corpus_ids;
    corpus_ids.reserve(corpus.objects.size());
    for (std::size_t i = 0; i < corpus.objects.size(); ++i) {
        const auto& obj = corpus.objects[i];
        corpus_ids.insert(obj.stix_id);
        auto kind = node_kind_from_object(obj.object_type);
        if (!kind) continue;
        Node node;
        node.stix_id = obj.stix_id;
        node.kind = *kind;
        node.name = obj.name.value_or("");
        node.external_id = obj.attack_external_id();
        node.object_index = i;
        graph.node_by_stix.emplace(node.stix_id, graph.nodes.size());
        graph.nodes.push_back(std::move(node));
    }

    for (std::size_t r = 0; r < corpus.relationships.size(); ++r) {
        const auto& rel = corpus.relationships[r];
        auto src = graph.node_by_stix.find(rel.source_ref);
        auto dst = graph.node_by_stix.find(rel.target_ref);
        if (src != graph.node_by_stix.end() && dst != graph.node_by_stix.end()) {
            graph.edges.push_back({src->second, dst->second, rel.relationship_type,
                                   rel.relationship_type_raw, rel.stix_id});
            continue;
        }
        auto classify = [&](const std::string& ref) {
            if (graph.node_by_stix.count(ref)) return std::string();
            return corpus_ids.count(ref) ? "non-behavioral endpoint " + ref
                                         : "dangling endpoint " + ref;
        };
        std::string reason = classify(rel.source_ref);
        std::string target_reason = classify(rel.target_ref);
        if (!reason.empty() && !target_reason.empty())
            reason += "; " + target_reason;
        else if (reason.empty())
            reason = std::move(target_reason);
        graph.quarantined.push_back({r, std::move(reason)});
    }
    return graph;
}

std::vector<Attribution> campaign_group_attributions(const BehaviorGraph& graph) {
    std::vector<Attribution> pairs;
    for (const auto& edge : graph.edges) {
        if (edge.kind != stix::RelationshipKind::kAttributedTo) continue;
        const Node& src = graph.nodes[edge.source];
        const Node& dst = graph.nodes[edge.target];
        if (src.kind != NodeKind::kCampaign || dst.kind != NodeKind::kIntrusionSet)
            continue;
        Attribution a;
        a.campaign_id = src.external_id.empty() ? src.stix_id : src.external_id;
        a.group_id = dst.external_id.empty() ? dst.stix_id : dst.external_id;
        a.campaign_name = src.name;
        a.group_name = dst.name;
        pairs.push_back(std::move(a));
    }
    std::sort(pairs.begin(), pairs.end(), [](const Attribution& a, const Attribution& b) {
        return std::tie(a.campaign_id, a.group_id) < std::tie(b.campaign_id, b.group_id);
    });
    return pairs;
}

nlohmann::json graph_to_json(const BehaviorGraph& graph) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : graph.nodes)
        nodes.push_back({{"stix_id", node.stix_id},
                         {"kind", to_string(node.kind)},
                         {"name", node.name},
                         {"external_id", node.external_id}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& edge : graph.edges)
        edges.push_back({{"stix_id", edge.stix_id},
                         {"relationship_type", edge.relationship_type_raw},
                         {"source", graph.nodes[edge.source].stix_id},
                         {"target", graph.nodes[edge.target].stix_id}});
    nlohmann::json quarantined = nlohmann::json::array();
    for (const auto& q : graph.quarantined) {
        const auto& rel = graph.corpus->relationships[q.relationship_index];
        quarantined.push_back({{"stix_id", rel.stix_id},
                               {"relationship_type", rel.relationship_type_raw},
                               {"source", rel.source_ref},
                               {"target", rel.target_ref},
                               {"reason", q.reason}});
    }
    return {{"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"quarantined", std::move(quarantined)}};
}

}  // namespace ctigap::graph
