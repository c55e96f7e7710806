#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rampart/data.hpp"
#include "rampart/error.hpp"
#include "rampart/parallel.hpp"
#include "rampart/rankers.hpp"
#include "rampart/rng.hpp"
#include "rampart/sampling.hpp"

namespace rampart {

/// Per-feature rank sums and appearance counts over a minipatch ensemble, aligned
/// with `pool`. bar_r is sum / count, NaN where the feature never appeared.
struct AveragedRanks {
    IndexList pool;
    std::vector<double> sum;
    std::vector<Index> count;
    std::vector<double> bar_r;

    explicit AveragedRanks(IndexList features = {})
        : pool(std::move(features)), sum(pool.size(), 0.0), count(pool.size(), 0),
          bar_r(pool.size(), std::numeric_limits<double>::quiet_NaN()) {}

    void update_means() {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            bar_r[i] = count[i] > 0 ? sum[i] / static_cast<double>(count[i])
                                    : std::numeric_limits<double>::quiet_NaN();
        }
    }
};

struct RampResult {
    AveragedRanks averaged;
    std::vector<Index> hat_r;  // aligned with averaged.pool; a permutation of 0..|pool|-1
    Index patches = 0;
    Index degenerate_patches = 0;
    std::vector<std::string> warnings;

    const IndexList& pool() const { return averaged.pool; }
};

struct RampOptions {
    unsigned threads = 1;
    // Patch b draws from derive_rng(master_seed, stream_offset + b).
    std::uint64_t stream_offset = 0;
};

/// Final 0-based ranks from averaged ranks: ascending bar_r, ties by ascending
/// feature id, never-sampled features after every sampled one (also by id).
inline std::vector<Index> finalize_ranks(const AveragedRanks& averaged) {
    const std::size_t size = averaged.pool.size();
    if (std::none_of(averaged.count.begin(), averaged.count.end(), [](Index c) { return c > 0; })) {
        throw ArgumentError("cannot finalize ranks: no feature was ever sampled");
    }
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool sa = averaged.count[a] > 0;
        const bool sb = averaged.count[b] > 0;
        if (sa != sb) return sa;
        if (sa && averaged.bar_r[a] != averaged.bar_r[b]) return averaged.bar_r[a] < averaged.bar_r[b];
        return averaged.pool[a] < averaged.pool[b];
    });
    std::vector<Index> hat_r(size);
    for (std::size_t pos = 0; pos < size; ++pos) hat_r[order[pos]] = static_cast<Index>(pos);
    return hat_r;
}

/// Ranked attributions with minipatches: B minipatches over `pool`, each ranked by
/// `ranker`, within-patch ranks averaged per feature and then sorted.
///
/// Patches are evaluated on `opts.threads` workers but accumulated in patch order,
/// so the result is bitwise identical for any worker count.
template <MinipatchRanker Ranker>
RampResult run_ramp(const Dataset& dataset, std::span<const Index> pool, const Ranker& ranker,
                    Index budget, Index n, Index m, std::uint64_t master_seed,
                    const RampOptions& opts = {}) {
    if (budget < 1) throw ArgumentError("minipatch budget B must be >= 1");
    if (pool.empty()) throw ArgumentError("feature pool is empty");
    const Index num_features = dataset.cols();
    std::vector<Index> position(static_cast<std::size_t>(num_features), -1);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const Index f = pool[i];
        if (f < 0 || f >= num_features) {
            throw ArgumentError("pool feature " + std::to_string(f) + " outside [0, M)");
        }
        if (position[f] >= 0) throw ArgumentError("pool lists feature " + std::to_string(f) + " twice");
        position[f] = static_cast<Index>(i);
    }
    if (n < 1 || n > dataset.rows()) {
        throw ArgumentError("observation subsample size n=" + std::to_string(n) +
                            " must lie in [1, N=" + std::to_string(dataset.rows()) + "]");
    }
    if (m < 1) throw ArgumentError("feature subsample size m must be >= 1");

    struct Slot {
        IndexList feats;
        RankVector ranks;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(budget));
    parallel_for(slots.size(), opts.threads, [&](std::size_t b) {
        Rng rng = derive_rng(master_seed, opts.stream_offset + b);
        MinipatchIndex patch = sample_minipatch(pool, dataset.rows(), n, m, rng, b);
        const PatchData data = extract_patch(dataset, patch);
        RankVector ranks = ranker(data, rng);
        if (ranks.ranks.size() != patch.feats.size()) {
            throw Error("ranker returned " + std::to_string(ranks.ranks.size()) + " ranks for " +
                        std::to_string(patch.feats.size()) + " features");
        }
        slots[b] = Slot{std::move(patch.feats), std::move(ranks)};
    });

    RampResult result{AveragedRanks(IndexList(pool.begin(), pool.end())), {}, budget, 0, {}};
    for (const Slot& slot : slots) {
        if (slot.ranks.degenerate) ++result.degenerate_patches;
        for (std::size_t c = 0; c < slot.feats.size(); ++c) {
            const auto p = static_cast<std::size_t>(position[slot.feats[c]]);
            result.averaged.sum[p] += static_cast<double>(slot.ranks.ranks[c]);
            result.averaged.count[p] += 1;
        }
    }
    result.averaged.update_means();
    result.hat_r = finalize_ranks(result.averaged);

    const auto unsampled = std::count(result.averaged.count.begin(), result.averaged.count.end(), 0);
    if (unsampled > 0) {
        result.warnings.push_back(std::to_string(unsampled) +
                                  " feature(s) never sampled; ranked after all sampled features");
    }
    if (result.degenerate_patches > 0) {
        result.warnings.push_back(std::to_string(result.degenerate_patches) +
                                  " minipatch(es) had a constant response; ranked in index order");
    }
    return result;
}

inline RampResult run_ramp(const Dataset& dataset, std::span<const Index> pool,
                           const RankerSpec& spec, Index budget, Index n, Index m,
                           std::uint64_t master_seed, const RampOptions& opts = {}) {
    validate(spec);
    return run_ramp(dataset, pool, SpecRanker{spec}, budget, n, m, master_seed, opts);
}

inline IndexList full_pool(Index num_features) {
    IndexList pool(static_cast<std::size_t>(num_features));
    std::iota(pool.begin(), pool.end(), Index{0});
    return pool;
}

/// Baseline: the ranking procedure applied once to the whole dataset.
inline std::vector<Index> rank_full_data(const Dataset& dataset, const RankerSpec& spec,
                                         std::uint64_t seed = 0) {
    validate(spec);
    const IndexList all = full_pool(dataset.cols());
    if (spec.kind == RankerKind::Oracle || spec.kind == RankerKind::NoisyOracle) {
        PatchData view;
        view.feats = all;
        view.task = dataset.task;
        Rng rng = derive_rng(seed, 0);
        return rank_minipatch(spec, view, rng).ranks;
    }
    MinipatchIndex everything{full_pool(dataset.rows()), all, 0};
    const PatchData data = extract_patch(dataset, everything);
    Rng rng = derive_rng(seed, 0);
    return rank_minipatch(spec, data, rng).ranks;
}

// feature,count,bar_r,hat_r, one row per pool feature in pool order.
inline std::string ramp_to_csv(const RampResult& result, const Dataset& dataset) {
    std::ostringstream out;
    out << "feature,count,bar_r,hat_r\n";
    const auto& avg = result.averaged;
    for (std::size_t i = 0; i < avg.pool.size(); ++i) {
        out << csv::quote(feature_label(dataset, avg.pool[i])) << ',' << avg.count[i] << ','
            << (avg.count[i] > 0 ? csv::format_double(avg.bar_r[i]) : std::string()) << ','
            << result.hat_r[i] << '\n';
    }
    return out.str();
}

}  // namespace rampart
