#include "ctigap/metrics/metrics.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ctigap/util/errors.hpp"

namespace ctigap::metrics {

double coverage(const graph::TechniqueMatrix& matrix) {
    if (matrix.cols() == 0)
        throw util::DomainError("coverage is undefined over an empty universe");
    std::size_t used = 0;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
            if (matrix.cells[r][c]) {
                ++used;
                break;
            }
        }
    }
    return static_cast<double>(used) / static_cast<double>(matrix.cols());
}

double sparsity(const graph::TechniqueMatrix& matrix) {
    if (matrix.rows() == 0 || matrix.cols() == 0)
        throw util::DomainError("sparsity is undefined for an empty matrix");
    const std::size_t total = matrix.rows() * matrix.cols();
    return static_cast<double>(total - matrix.ones_count()) /
           static_cast<double>(total);
}

FrequencyTable technique_frequency(const graph::TechniqueMatrix& matrix) {
    FrequencyTable table;
    table.row_total = matrix.rows();
    table.entries.reserve(matrix.cols());
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        FrequencyEntry entry;
        entry.attack_id = matrix.col_ids[c];
        for (std::size_t r = 0; r < matrix.rows(); ++r)
            entry.row_count += matrix.cells[r][c];
        entry.fraction = matrix.rows() == 0
                             ? 0.0
                             : static_cast<double>(entry.row_count) / matrix.rows();
        table.entries.push_back(std::move(entry));
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const FrequencyEntry& a, const FrequencyEntry& b) {
                  if (a.row_count != b.row_count) return a.row_count > b.row_count;
                  return a.attack_id < b.attack_id;
              });
    return table;
}

double jaccard(const Row& a, const Row& b) {
    if (a.size() != b.size())
        throw util::DomainError("jaccard requires rows over the same universe");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool in_a = a[i] != 0, in_b = b[i] != 0;
        inter += in_a && in_b;
        uni += in_a || in_b;
    }
    if (uni == 0) return 1.0;  // identical empty sets are maximally similar
    return static_cast<double>(inter) / static_cast<double>(uni);
}

DistanceMatrix overlap_matrix(const graph::TechniqueMatrix& matrix) {
    if (matrix.rows() < 2)
        throw util::DomainError("overlap matrix needs at least two rows");
    const std::size_t n = matrix.rows();
    DistanceMatrix out(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out[i][j] = out[j][i] = jaccard(matrix.cells[i], matrix.cells[j]);
    return out;
}

DistanceMatrix jaccard_distance_matrix(const graph::TechniqueMatrix& matrix) {
    DistanceMatrix out = overlap_matrix(matrix);
    for (auto& row : out)
        for (double& v : row) v = 1.0 - v;
    return out;
}

std::vector<std::pair<std::string, std::string>> universal_cooccurrence(
    const graph::TechniqueMatrix& matrix) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (matrix.rows() == 0) return pairs;
    std::vector<std::size_t> universal;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        bool everywhere = true;
        for (std::size_t r = 0; r < matrix.rows() && everywhere; ++r)
            everywhere = matrix.cells[r][c] != 0;
        if (everywhere) universal.push_back(c);
    }
    for (std::size_t i = 0; i < universal.size(); ++i)
        for (std::size_t j = i + 1; j < universal.size(); ++j)
            pairs.emplace_back(matrix.col_ids[universal[i]],
                               matrix.col_ids[universal[j]]);
    return pairs;
}

AlignmentScores alignment(const Row& campaign_row, const Row& group_row,
                          std::string campaign_id, std::string group_id) {
    if (campaign_row.size() != group_row.size())
        throw util::DomainError("alignment requires rows over the same universe");
    AlignmentScores scores;
    scores.campaign_id = std::move(campaign_id);
    scores.group_id = std::move(group_id);
    for (std::size_t i = 0; i < campaign_row.size(); ++i) {
        const bool c = campaign_row[i] != 0, g = group_row[i] != 0;
        scores.shared += c && g;
        scores.campaign_size += c;
        scores.group_size += g;
    }
    if (scores.campaign_size > 0)
        scores.campaign_in_group =
            static_cast<double>(scores.shared) / scores.campaign_size;
    if (scores.group_size > 0)
        scores.group_in_campaign =
            static_cast<double>(scores.shared) / scores.group_size;
    return scores;
}

AsymmetryReport asymmetry_report(
    const graph::TechniqueMatrix& campaigns, const graph::TechniqueMatrix& groups,
    const std::vector<graph::Attribution>& attributions) {
    if (campaigns.col_ids != groups.col_ids)
        throw util::DomainError("asymmetry requires matrices over the same universe");
    const std::size_t cols = campaigns.cols();

    auto column_union = [cols](const graph::TechniqueMatrix& m) {
        std::vector<std::uint8_t> used(cols, 0);
        for (const auto& row : m.cells)
            for (std::size_t c = 0; c < cols; ++c)
                if (row[c]) used[c] = 1;
        return used;
    };
    const auto campaign_union = column_union(campaigns);
    const auto group_union = column_union(groups);

    AsymmetryReport report;
    for (std::size_t c = 0; c < cols; ++c) {
        report.campaign_used += campaign_union[c];
        report.group_used += group_union[c];
        report.campaign_only += campaign_union[c] && !group_union[c];
        report.group_only_vs_campaigns += group_union[c] && !campaign_union[c];
    }

    // Group profiles reachable through any attribution edge.
    std::unordered_map<std::string, std::vector<std::string>> groups_of_campaign;
    std::unordered_set<std::string> attributed_groups;
    for (const auto& att : attributions) {
        groups_of_campaign[att.campaign_id].push_back(att.group_id);
        attributed_groups.insert(att.group_id);
    }
    std::vector<std::uint8_t> attributed_union(cols, 0);
    for (std::size_t r = 0; r < groups.rows(); ++r) {
        if (!attributed_groups.count(groups.row_ids[r])) continue;
        for (std::size_t c = 0; c < cols; ++c)
            if (groups.cells[r][c]) attributed_union[c] = 1;
    }
    for (std::size_t c = 0; c < cols; ++c)
        report.campaign_only_vs_attributed +=
            campaign_union[c] && !attributed_union[c];

    // Unattributed campaigns are a mapping problem, not an asymmetry signal:
    // only campaigns with at least one attribution edge enter this variant.
    std::vector<std::uint8_t> uncovered(cols, 0);
    for (std::size_t r = 0; r < campaigns.rows(); ++r) {
        auto it = groups_of_campaign.find(campaigns.row_ids[r]);
        if (it == groups_of_campaign.end()) continue;
        std::vector<std::uint8_t> own_groups(cols, 0);
        for (const auto& gid : it->second) {
            auto g = groups.row_index(gid);
            if (!g) continue;
            for (std::size_t c = 0; c < cols; ++c)
                if (groups.cells[*g][c]) own_groups[c] = 1;
        }
        for (std::size_t c = 0; c < cols; ++c)
            if (campaigns.cells[r][c] && !own_groups[c]) uncovered[c] = 1;
    }
    for (std::size_t c = 0; c < cols; ++c)
        report.campaign_only_per_campaign += uncovered[c];
    return report;
}

}  // namespace ctigap::metrics
