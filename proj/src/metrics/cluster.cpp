#include <algorithm>
#include <limits>

#include "ctigap/metrics/metrics.hpp"
#include "ctigap/util/errors.hpp"

namespace ctigap::metrics {
namespace {

// Relabels cluster slots to 0..k-1 by first occurrence along row order.
std::vector<int> normalize_labels(const std::vector<int>& slots) {
    std::vector<int> labels(slots.size(), -1);
    std::vector<int> seen;  // slot -> normalized index, by discovery order
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto it = std::find(seen.begin(), seen.end(), slots[i]);
        if (it == seen.end()) {
            labels[i] = static_cast<int>(seen.size());
            seen.push_back(slots[i]);
        } else {
            labels[i] = static_cast<int>(it - seen.begin());
        }
    }
    return labels;
}

double silhouette_score(const DistanceMatrix& dist, const std::vector<int>& labels) {
    const std::size_t n = labels.size();
    int k = 0;
    for (int label : labels) k = std::max(k, label + 1);
    std::vector<std::size_t> cluster_size(k, 0);
    for (int label : labels) ++cluster_size[label];

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cluster_size[labels[i]] <= 1) continue;  // singleton: s = 0
        std::vector<double> sum(k, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum[labels[j]] += dist[i][j];
        const double a =
            sum[labels[i]] / static_cast<double>(cluster_size[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == labels[i] || cluster_size[c] == 0) continue;
            b = std::min(b, sum[c] / static_cast<double>(cluster_size[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

}  // namespace

ClusterResult cluster(const graph::TechniqueMatrix& matrix, std::size_t k_min,
                      std::size_t k_max) {
    const std::size_t n = matrix.rows();
    if (k_min < 2) k_min = 2;
    if (n < 2) throw util::DomainError("clustering needs at least two rows");
    const std::size_t k_hi = std::min(k_max, n - 1);
    if (k_hi < k_min)
        throw util::DomainError("too few rows for the requested cluster range");

    const DistanceMatrix original = jaccard_distance_matrix(matrix);

    ClusterResult result;
    result.row_ids = matrix.row_ids;

    bool any_distance = false;
    for (std::size_t i = 0; i < n && !any_distance; ++i)
        for (std::size_t j = i + 1; j < n && !any_distance; ++j)
            any_distance = original[i][j] > 0.0;
    if (!any_distance) {
        result.degenerate = true;
        result.k = 1;
        result.labels.assign(n, 0);
        return result;
    }

    // Agglomerative average linkage. Slot index = smallest original row in
    // the cluster; merges always fold the higher slot into the lower one,
    // with inter-cluster distances updated by the weighted (Lance-Williams)
    // average rule.
    DistanceMatrix dist = original;
    std::vector<bool> alive(n, true);
    std::vector<std::size_t> size(n, 1);
    std::vector<int> slot_of_row(n);
    for (std::size_t i = 0; i < n; ++i) slot_of_row[i] = static_cast<int>(i);

    std::vector<std::vector<int>> labels_at_k(k_hi + 1);
    if (n >= k_min && n <= k_hi) labels_at_k[n] = normalize_labels(slot_of_row);

    for (std::size_t remaining = n; remaining > 1; --remaining) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_a = 0, best_b = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!alive[b]) continue;
                if (dist[a][b] < best) {
                    best = dist[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c] || c == best_a || c == best_b) continue;
            dist[best_a][c] = dist[c][best_a] =
                (size[best_a] * dist[best_a][c] + size[best_b] * dist[best_b][c]) /
                static_cast<double>(size[best_a] + size[best_b]);
        }
        size[best_a] += size[best_b];
        alive[best_b] = false;
        for (auto& slot : slot_of_row)
            if (slot == static_cast<int>(best_b)) slot = static_cast<int>(best_a);

        const std::size_t now = remaining - 1;
        if (now >= k_min && now <= k_hi)
            labels_at_k[now] = normalize_labels(slot_of_row);
    }

    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_hi; ++k) {
        if (labels_at_k[k].empty()) continue;
        const double score = silhouette_score(original, labels_at_k[k]);
        result.per_k_scores.emplace_back(k, score);
        if (score > best_score) {
            best_score = score;
            result.k = k;
            result.labels = labels_at_k[k];
            result.silhouette = score;
        }
    }
    return result;
}

}  // namespace ctigap::metrics
