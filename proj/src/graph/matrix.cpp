#include "ctigap/graph/matrix.hpp"

#include <algorithm>
#include <tuple>

#include "ctigap/attack/attack_id.hpp"
#include "ctigap/attack/tactics.hpp"

namespace ctigap::graph {
namespace {

// Smallest canonical tactic index among a technique's tactics, or
// kTacticCount when none is recognized (sorts after every real tactic).
int earliest_tactic_rank(const std::vector<std::string>& tactic_names) {
    int best = attack::kTacticCount;
    for (const auto& name : tactic_names)
        if (auto idx = attack::tactic_index(name); idx && *idx < best) best = *idx;
    return best;
}

struct UniverseOrder {
    int tactic_rank;
    attack::ExternalIdKey id_key;
    const std::string* stix_id;

    bool operator<(const UniverseOrder& other) const {
        if (tactic_rank != other.tactic_rank) return tactic_rank < other.tactic_rank;
        if (id_key < other.id_key) return true;
        if (other.id_key < id_key) return false;
        return *stix_id < *other.stix_id;
    }
};

}  // namespace

std::optional<FilterPolicy> filter_policy_from_string(std::string_view name) {
    if (name == "default") return FilterPolicy::kDefault;
    if (name == "none") return FilterPolicy::kNone;
    return std::nullopt;
}

std::vector<Technique> technique_universe(const BehaviorGraph& graph,
                                          FilterPolicy policy) {
    std::vector<Technique> universe;
    for (const auto& node : graph.nodes) {
        if (node.kind != NodeKind::kTechnique) continue;
        const auto& obj = graph.object_of(node);

        std::vector<std::string> tactics;
        for (const auto& phase : obj.kill_chain_phases)
            if (phase.kill_chain_name == "mitre-attack")
                tactics.push_back(phase.phase_name);

        if (policy == FilterPolicy::kDefault) {
            if (obj.revoked || obj.deprecated || tactics.empty()) continue;
        }

        Technique t;
        t.attack_id = node.external_id;
        t.name = node.name;
        t.tactic_names = std::move(tactics);
        t.stix_id = node.stix_id;
        if (auto it = obj.raw_extras.find("x_mitre_platforms");
            it != obj.raw_extras.end() && it->is_array()) {
            for (const auto& p : *it)
                if (p.is_string()) t.platforms.push_back(p.get<std::string>());
        }
        if (auto parsed = attack::parse_attack_id(t.attack_id)) {
            t.is_subtechnique = parsed->is_subtechnique();
            if (t.is_subtechnique) t.parent_attack_id = parsed->parent();
        }
        universe.push_back(std::move(t));
    }

    std::vector<std::size_t> order(universe.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<UniverseOrder> keys;
    keys.reserve(universe.size());
    for (const auto& t : universe)
        keys.push_back({earliest_tactic_rank(t.tactic_names),
                        attack::external_id_key(t.attack_id), &t.stix_id});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    std::vector<Technique> sorted;
    sorted.reserve(universe.size());
    for (std::size_t i : order) sorted.push_back(std::move(universe[i]));
    return sorted;
}

std::size_t TechniqueMatrix::ones_count() const {
    std::size_t total = 0;
    for (const auto& row : cells)
        for (std::uint8_t cell : row) total += cell;
    return total;
}

std::optional<std::size_t> TechniqueMatrix::row_index(std::string_view key) const {
    for (std::size_t i = 0; i < row_ids.size(); ++i)
        if (row_ids[i] == key) return i;
    for (std::size_t i = 0; i < row_names.size(); ++i)
        if (row_names[i] == key) return i;
    return std::nullopt;
}

TechniqueMatrix entity_technique_matrix(const BehaviorGraph& graph,
                                        NodeKind entity_kind,
                                        const std::vector<Technique>& universe) {
    TechniqueMatrix matrix;
    std::unordered_map<std::string, std::size_t> col_by_stix;
    matrix.col_ids.reserve(universe.size());
    for (std::size_t c = 0; c < universe.size(); ++c) {
        matrix.col_ids.push_back(universe[c].attack_id);
        col_by_stix.emplace(universe[c].stix_id, c);
    }

    struct RowBuild {
        std::string id;
        std::string name;
        std::vector<std::uint8_t> cells;
        bool any = false;
    };
    std::unordered_map<std::size_t, std::size_t> row_by_node;  // node idx -> row idx
    std::vector<RowBuild> rows;
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        const auto& node = graph.nodes[n];
        if (node.kind != entity_kind) continue;
        row_by_node.emplace(n, rows.size());
        rows.push_back({node.external_id.empty() ? node.stix_id : node.external_id,
                        node.name,
                        std::vector<std::uint8_t>(universe.size(), 0),
                        false});
    }

    for (const auto& edge : graph.edges) {
        if (edge.kind != stix::RelationshipKind::kUses) continue;
        auto row_it = row_by_node.find(edge.source);
        if (row_it == row_by_node.end()) continue;
        auto col_it = col_by_stix.find(graph.nodes[edge.target].stix_id);
        if (col_it == col_by_stix.end()) continue;
        rows[row_it->second].cells[col_it->second] = 1;
        rows[row_it->second].any = true;
    }

    std::sort(rows.begin(), rows.end(), [](const RowBuild& a, const RowBuild& b) {
        return std::tie(a.id, a.name) < std::tie(b.id, b.name);
    });
    for (auto& row : rows) {
        if (!row.any) {
            matrix.excluded_rows.push_back(row.id);
            continue;
        }
        matrix.row_ids.push_back(std::move(row.id));
        matrix.row_names.push_back(std::move(row.name));
        matrix.cells.push_back(std::move(row.cells));
    }
    return matrix;
}

std::string matrix_to_csv(const TechniqueMatrix& matrix) {
    std::string out = "entity_id";
    for (const auto& col : matrix.col_ids) {
        out += ',';
        out += col;
    }
    out += '\n';
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        out += matrix.row_ids[r];
        for (std::uint8_t cell : matrix.cells[r]) {
            out += ',';
            out += cell ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

nlohmann::json matrix_to_json(const TechniqueMatrix& matrix) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        nlohmann::json techniques = nlohmann::json::array();
        for (std::size_t c = 0; c < matrix.cols(); ++c)
            if (matrix.cells[r][c]) techniques.push_back(matrix.col_ids[c]);
        rows.push_back({{"id", matrix.row_ids[r]},
                        {"name", matrix.row_names[r]},
                        {"techniques", std::move(techniques)}});
    }
    return {{"columns", matrix.col_ids},
            {"rows", std::move(rows)},
            {"excluded_rows", matrix.excluded_rows}};
}

}  // namespace ctigap::graph
