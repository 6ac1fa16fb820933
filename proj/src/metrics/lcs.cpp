#include <map>
#include <string_view>

#include "ctigap/metrics/metrics.hpp"

namespace ctigap::metrics {

// Suffix DP plus a greedy reconstruction that, at each step, takes the
// lexicographically smallest symbol whose earliest occurrence pair still
// admits a maximum-length continuation. The earliest pair dominates every
// later pair of the same symbol (dp is coordinate-wise non-increasing), so
// checking only it is sufficient.
std::vector<std::string> lcs(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                                    : std::max(dp[i + 1][j], dp[i][j + 1]);

    std::vector<std::string> out;
    out.reserve(dp[0][0]);
    std::size_t i = 0, j = 0;
    while (dp[i][j] > 0) {
        const int need = dp[i][j];
        std::map<std::string_view, std::size_t> first_a, first_b;
        for (std::size_t p = i; p < n; ++p) first_a.try_emplace(a[p], p);
        for (std::size_t q = j; q < m; ++q) first_b.try_emplace(b[q], q);
        for (const auto& [symbol, pa] : first_a) {
            auto it = first_b.find(symbol);
            if (it == first_b.end()) continue;
            if (dp[pa + 1][it->second + 1] == need - 1) {
                out.emplace_back(symbol);
                i = pa + 1;
                j = it->second + 1;
                break;
            }
        }
    }
    return out;
}

}  // namespace ctigap::metrics
