#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rampart/data.hpp"
#include "rampart/error.hpp"
#include "rampart/rng.hpp"

namespace rampart {

// One jointly subsampled block: n observation rows and m_eff feature columns.
// Both lists are sorted and duplicate-free; feats holds global feature ids.
struct MinipatchIndex {
    IndexList obs;
    IndexList feats;
    std::uint64_t patch_id = 0;
};

/// Draws `count` distinct positions from {0, ..., population - 1}, uniformly over all
/// subsets, and returns them sorted. Robert Floyd's algorithm: `count` draws, no
/// O(population) shuffle.
inline IndexList sample_without_replacement(Index population, Index count, Rng& rng) {
    std::vector<bool> taken(static_cast<std::size_t>(population), false);
    IndexList out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index j = population - count; j < population; ++j) {
        auto t = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(j) + 1));
        if (taken[t]) t = j;
        taken[t] = true;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Uniform minipatch: n of N observations and min(m, |pool|) features of `pool`,
/// both without replacement.
inline MinipatchIndex sample_minipatch(std::span<const Index> pool, Index num_obs,
                                       Index n, Index m, Rng& rng, std::uint64_t patch_id) {
    if (pool.empty()) throw ArgumentError("cannot sample a minipatch from an empty feature pool");
    if (n < 1 || n > num_obs) {
        throw ArgumentError("observation subsample size n=" + std::to_string(n) +
                            " must lie in [1, N=" + std::to_string(num_obs) + "]");
    }
    if (m < 1) throw ArgumentError("feature subsample size m must be >= 1");

    MinipatchIndex patch;
    patch.patch_id = patch_id;
    patch.obs = sample_without_replacement(num_obs, n, rng);

    const auto pool_size = static_cast<Index>(pool.size());
    const Index m_eff = std::min(m, pool_size);
    if (m_eff == pool_size) {
        patch.feats.assign(pool.begin(), pool.end());
    } else {
        const IndexList positions = sample_without_replacement(pool_size, m_eff, rng);
        patch.feats.reserve(static_cast<std::size_t>(m_eff));
        for (Index p : positions) patch.feats.push_back(pool[p]);
    }
    std::sort(patch.feats.begin(), patch.feats.end());
    return patch;
}

}  // namespace rampart
