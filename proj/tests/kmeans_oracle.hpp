#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "serpmine/clustering.hpp"

namespace serpmine::test {

// Exact minimum wcss over every possible assignment of n points to k
// clusters. Exponential; keep n small.
inline double brute_force_wcss(const Matrix& data, int k) {
    const std::size_t n = data.size();
    const std::size_t d = data.empty() ? 0 : data[0].size();

    std::vector<int> assign(n, 0);
    double best = std::numeric_limits<double>::infinity();

    while (true) {
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                              std::vector<double>(d, 0.0));
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[static_cast<std::size_t>(assign[i])]++;
            for (std::size_t j = 0; j < d; ++j)
                sums[static_cast<std::size_t>(assign[i])][j] += data[i][j];
        }
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = data[i][j] - sums[c][j] / counts[c];
                wcss += diff * diff;
            }
        }
        if (wcss < best) best = wcss;

        std::size_t pos = 0;
        while (pos < n) {
            if (++assign[pos] < k) break;
            assign[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }
    return best;
}

// Small deterministic instance generator for oracle comparisons.
inline Matrix random_instance(std::uint64_t seed, std::size_t n, std::size_t d,
                              double spread) {
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return (rng() >> 11) * 0x1.0p-53; };
    Matrix m(n, std::vector<double>(d));
    for (auto& row : m)
        for (auto& v : row) v = (uniform() * 2.0 - 1.0) * spread;
    return m;
}

}  // namespace serpmine::test
