#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is written directly from the defining formulas and must
// not call the implementation paths it verifies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rex::oracle {

/// Linear-scan BM25: recounts tf/df from the raw token lists.
inline double bm25_scan(const std::vector<std::vector<std::string>>& docs,
                        const std::vector<std::string>& query, std::size_t doc, double k1,
                        double b) {
    const double n = static_cast<double>(docs.size());
    double total_len = 0.0;
    for (const auto& d : docs) total_len += static_cast<double>(d.size());
    const double avgdl = docs.empty() ? 0.0 : total_len / n;
    const double len = static_cast<double>(docs[doc].size());

    double score = 0.0;
    for (const auto& term : query) {
        double tf = 0.0;
        for (const auto& t : docs[doc]) tf += t == term ? 1.0 : 0.0;
        if (tf == 0.0) continue;
        double df = 0.0;
        for (const auto& d : docs) {
            df += std::find(d.begin(), d.end(), term) != d.end() ? 1.0 : 0.0;
        }
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        const double norm = avgdl > 0.0 ? len / avgdl : 1.0;
        score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * norm));
    }
    return score;
}

/// Direct-formula NDCG with linear gain.
inline double ndcg_direct(const std::vector<int>& gains_in_order, std::size_t k) {
    const std::size_t cutoff = std::min(k, gains_in_order.size());
    double dcg = 0.0;
    for (std::size_t p = 0; p < cutoff; ++p) {
        dcg += gains_in_order[p] / std::log2(static_cast<double>(p) + 2.0);
    }
    std::vector<int> ideal = gains_in_order;
    std::sort(ideal.rbegin(), ideal.rend());
    double idcg = 0.0;
    for (std::size_t p = 0; p < cutoff; ++p) {
        idcg += ideal[p] / std::log2(static_cast<double>(p) + 2.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

/// Brute-force Shapley by direct subset enumeration. The value function is
/// any map from a keep-mask to a real. Weights are recomputed here from
/// factorials, independent of the library.
inline std::vector<double> shapley_enumerate(
    std::size_t n, const std::function<double(const std::vector<bool>&)>& value) {
    auto factorial = [](std::size_t x) {
        double f = 1.0;
        for (std::size_t i = 2; i <= x; ++i) f *= static_cast<double>(i);
        return f;
    };
    std::vector<double> phi(n, 0.0);
    const std::size_t n_masks = std::size_t{1} << n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & (std::size_t{1} << i)) continue;
            std::size_t size = 0;
            std::vector<bool> without(n, false);
            for (std::size_t j = 0; j < n; ++j) {
                if (mask & (std::size_t{1} << j)) {
                    without[j] = true;
                    ++size;
                }
            }
            std::vector<bool> with = without;
            with[i] = true;
            const double weight =
                factorial(size) * factorial(n - size - 1) / factorial(n);
            phi[i] += weight * (value(with) - value(without));
        }
    }
    return phi;
}

/// Longest common subsequence length by a plain recursive definition with
/// memoization (different shape from the library's iterative DP).
inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
    std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
    std::function<std::size_t(std::size_t, std::size_t)> rec = [&](std::size_t i,
                                                                   std::size_t j) -> std::size_t {
        if (i == 0 || j == 0) return 0;
        int& slot = memo[i][j];
        if (slot >= 0) return static_cast<std::size_t>(slot);
        std::size_t best;
        if (a[i - 1] == b[j - 1]) {
            best = rec(i - 1, j - 1) + 1;
        } else {
            best = std::max(rec(i - 1, j), rec(i, j - 1));
        }
        slot = static_cast<int>(best);
        return best;
    };
    return rec(a.size(), b.size());
}

}  // namespace rex::oracle
