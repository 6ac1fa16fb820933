#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctigap/graph/matrix.hpp"

namespace ctigap::metrics {

using Row = std::vector<std::uint8_t>;
using DistanceMatrix = std::vector<std::vector<double>>;

// Fraction of universe columns with at least one 1. DomainError on an
// empty universe.
double coverage(const graph::TechniqueMatrix& matrix);

// Fraction of zero cells. DomainError on an empty matrix.
double sparsity(const graph::TechniqueMatrix& matrix);

struct FrequencyEntry {
    std::string attack_id;
    std::size_t row_count = 0;
    double fraction = 0.0;
};

struct FrequencyTable {
    std::vector<FrequencyEntry> entries;  // descending count, ascending id
    std::size_t row_total = 0;
};

// Per-technique row counts over every universe column (zero counts
// included), sorted descending by count then ascending by attack_id.
FrequencyTable technique_frequency(const graph::TechniqueMatrix& matrix);

// |A∩B| / |A∪B| with J(∅,∅)=1. DomainError when the rows span different
// universes (length mismatch).
double jaccard(const Row& a, const Row& b);

// Symmetric pairwise Jaccard similarity with unit diagonal. DomainError
// with fewer than two rows.
DistanceMatrix overlap_matrix(const graph::TechniqueMatrix& matrix);

// 1 − pairwise Jaccard similarity.
DistanceMatrix jaccard_distance_matrix(const graph::TechniqueMatrix& matrix);

struct ClusterResult {
    std::size_t k = 0;
    std::vector<int> labels;           // parallel to row_ids
    std::vector<std::string> row_ids;
    double silhouette = 0.0;
    std::vector<std::pair<std::size_t, double>> per_k_scores;
    bool degenerate = false;  // all pairwise distances zero
};

// Agglomerative average-linkage clustering over Jaccard distance. k is
// scanned over [k_min, min(k_max, rows−1)]; the k with the best silhouette
// wins (smaller k on ties). Deterministic merge order: lowest average
// distance, ties broken by the smallest involved row indices.
ClusterResult cluster(const graph::TechniqueMatrix& matrix, std::size_t k_min = 2,
                      std::size_t k_max = 10);

struct Embedding {
    std::vector<std::array<double, 2>> coords;
    std::array<double, 2> eigenvalues{0.0, 0.0};
    int negative_eigenvalues = 0;     // count across the full spectrum
    double most_negative = 0.0;       // magnitude of the worst negative
};

// Classical metric MDS (principal coordinates): double-center the squared
// distances, take the top two eigenpairs, scale by root eigenvalues.
// Negative eigenvalues are clamped to zero and reported. Axis signs are
// fixed by making each axis's largest-magnitude coordinate positive.
// DomainError on a non-symmetric input.
Embedding embed_2d(const DistanceMatrix& distances);

// Longest common subsequence; among maximum-length answers the
// lexicographically least is returned.
std::vector<std::string> lcs(const std::vector<std::string>& a,
                             const std::vector<std::string>& b);

// All column pairs (earlier column first) whose cells are 1 in every row.
std::vector<std::pair<std::string, std::string>> universal_cooccurrence(
    const graph::TechniqueMatrix& matrix);

struct AlignmentScores {
    std::string campaign_id;
    std::string group_id;
    std::size_t shared = 0;
    std::size_t campaign_size = 0;
    std::size_t group_size = 0;
    double campaign_in_group = 0.0;  // |C∩G| / |C|
    double group_in_campaign = 0.0;  // |C∩G| / |G|
};

// Both direction fractions for one campaign/group row pair. Rows must span
// the same universe.
AlignmentScores alignment(const Row& campaign_row, const Row& group_row,
                          std::string campaign_id = {}, std::string group_id = {});

struct AsymmetryReport {
    std::size_t campaign_used = 0;  // distinct techniques used by any campaign
    std::size_t group_used = 0;     // distinct techniques used by any intrusion set
    // Campaign techniques appearing in no intrusion-set profile at all.
    std::size_t campaign_only = 0;
    // Campaign techniques absent from the union of all attributed groups'
    // profiles (groups never attributed contribute nothing).
    std::size_t campaign_only_vs_attributed = 0;
    // Union over attributed campaigns of techniques each campaign uses that
    // its own attributed groups do not; unattributed campaigns are excluded.
    std::size_t campaign_only_per_campaign = 0;
    // Intrusion-set techniques appearing in no campaign.
    std::size_t group_only_vs_campaigns = 0;
};

// Structural asymmetry between what campaigns exhibit and what their
// attributed intrusion sets are credited with. The three campaign_only
// variants differ in which group profiles count as "covering" a campaign
// technique; all are reported.
AsymmetryReport asymmetry_report(
    const graph::TechniqueMatrix& campaigns, const graph::TechniqueMatrix& groups,
    const std::vector<graph::Attribution>& attributions);

}  // namespace ctigap::metrics
