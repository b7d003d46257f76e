#pragma once

// Brute-force combinatorial oracles, independent of the series engine.

#include <cstdint>
#include <functional>
#include <vector>

#include "qidforge/series.hpp"

namespace oracles {

// partitions of 0..nmax into parts from `allowed` (empty = all parts 1..nmax)
inline std::vector<qidforge::Int> partition_counts(
    int nmax, const std::function<bool(int)>& part_ok = nullptr) {
    std::vector<qidforge::Int> dp(static_cast<std::size_t>(nmax) + 1);
    dp[0] = 1;
    for (int part = 1; part <= nmax; ++part) {
        if (part_ok && !part_ok(part)) continue;
        for (int s = part; s <= nmax; ++s) dp[static_cast<std::size_t>(s)] += dp[static_cast<std::size_t>(s - part)];
    }
    return dp;
}

// partitions into distinct parts
inline std::vector<qidforge::Int> distinct_partition_counts(int nmax) {
    std::vector<qidforge::Int> dp(static_cast<std::size_t>(nmax) + 1);
    dp[0] = 1;
    for (int part = 1; part <= nmax; ++part)
        for (int s = nmax; s >= part; --s) dp[static_cast<std::size_t>(s)] += dp[static_cast<std::size_t>(s - part)];
    return dp;
}

} // namespace oracles
