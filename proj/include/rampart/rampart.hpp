#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rampart/data.hpp"
#include "rampart/error.hpp"
#include "rampart/ramp.hpp"
#include "rampart/rankers.hpp"

namespace rampart {

enum class Allocation { Uniform, Geometric };

inline std::string_view to_string(Allocation a) {
    return a == Allocation::Uniform ? "uniform" : "geometric";
}

inline Allocation parse_allocation(std::string_view name) {
    if (name == "uniform") return Allocation::Uniform;
    if (name == "geometric") return Allocation::Geometric;
    throw ArgumentError("unknown allocation '" + std::string(name) + "' (expected uniform or geometric)");
}

/// Candidate-pool sizes and per-iteration minipatch budgets of the halving loop.
struct HalvingSchedule {
    Index iterations = 0;
    IndexList pool_sizes;
    IndexList budgets;
    Index stop_size = 0;

    Index total_budget() const {
        Index total = 0;
        for (Index b : budgets) total += b;
        return total;
    }
    Index max_budget() const { return budgets.empty() ? 0 : *std::max_element(budgets.begin(), budgets.end()); }
};

/// Halving schedule for M features, target k and feature subsample size m.
///
/// Pools halve (floor) from M and stop at stop_size = max(k, min(m, M)), giving
/// T = floor(log2(M / stop_size)) + 1 iterations. Uniform splits total_budget evenly
/// with the remainder going to the earliest iterations; Geometric weights iteration t
/// by 2^t so the narrower late pools get more minipatches.
inline HalvingSchedule compute_schedule(Index num_features, Index k, Index m, Index total_budget,
                                        Allocation allocation = Allocation::Uniform) {
    if (k < 1 || k > num_features) {
        throw ArgumentError("k=" + std::to_string(k) + " must lie in [1, M=" +
                            std::to_string(num_features) + "]");
    }
    if (m < 1) throw ArgumentError("feature subsample size m must be >= 1");

    HalvingSchedule s;
    s.stop_size = std::max(k, std::min(m, num_features));
    s.pool_sizes.push_back(num_features);
    while (s.pool_sizes.back() / 2 >= s.stop_size) s.pool_sizes.push_back(s.pool_sizes.back() / 2);
    s.iterations = static_cast<Index>(s.pool_sizes.size());

    const Index t_count = s.iterations;
    if (total_budget < t_count) {
        throw ArgumentError("total budget " + std::to_string(total_budget) + " is smaller than the " +
                            std::to_string(t_count) + " halving iterations");
    }
    s.budgets.assign(static_cast<std::size_t>(t_count), 0);
    if (allocation == Allocation::Uniform) {
        const Index base = total_budget / t_count;
        const Index extra = total_budget % t_count;
        for (Index t = 0; t < t_count; ++t) s.budgets[t] = base + (t < extra ? 1 : 0);
    } else {
        const double denom = std::ldexp(1.0, static_cast<int>(t_count)) - 1.0;
        Index assigned = 0;
        for (Index t = 0; t + 1 < t_count; ++t) {
            const double share = std::ldexp(1.0, static_cast<int>(t)) / denom;
            s.budgets[t] = std::max<Index>(1, static_cast<Index>(std::floor(share * static_cast<double>(total_budget))));
            assigned += s.budgets[t];
        }
        s.budgets.back() = total_budget - assigned;
        if (s.budgets.back() < 1) {
            throw ArgumentError("total budget too small for geometric allocation over " +
                                std::to_string(t_count) + " iterations");
        }
    }
    return s;
}

/// Features of `iteration` that rank among the best `next_size`, sorted by id.
inline IndexList survivors(const RampResult& iteration, Index next_size) {
    const auto& pool = iteration.pool();
    if (next_size < 0 || next_size > static_cast<Index>(pool.size())) {
        throw ArgumentError("cannot keep " + std::to_string(next_size) + " of " +
                            std::to_string(pool.size()) + " features");
    }
    IndexList kept;
    kept.reserve(static_cast<std::size_t>(next_size));
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (iteration.hat_r[i] < next_size) kept.push_back(pool[i]);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

struct RampartResult {
    std::vector<Index> hat_r;        // length M; eliminated features carry the sentinel k
    std::vector<RampResult> trace;   // one RAMP result per iteration, on that iteration's pool
    HalvingSchedule schedule;
    Index k = 0;

    Index total_patches() const {
        Index total = 0;
        for (const auto& r : trace) total += r.patches;
        return total;
    }
};

// Iteration t's patch b uses stream tag (t << 32) + b, so budgets of later
// iterations never shift the streams of earlier ones.
constexpr std::uint64_t iteration_stream_offset(Index t) {
    return static_cast<std::uint64_t>(t) << 32;
}

/// RAMP with recursive trimming: RAMP over the current pool, keep the better half,
/// repeat per `schedule`. Final ranks come from the last iteration; every feature
/// eliminated earlier gets rank k.
template <MinipatchRanker Ranker>
RampartResult run_rampart(const Dataset& dataset, const Ranker& ranker,
                          const HalvingSchedule& schedule, Index n, Index m, Index k,
                          std::uint64_t master_seed, unsigned threads = 1) {
    const Index num_features = dataset.cols();
    if (schedule.iterations < 1 || schedule.pool_sizes.size() != static_cast<std::size_t>(schedule.iterations) ||
        schedule.budgets.size() != static_cast<std::size_t>(schedule.iterations)) {
        throw ArgumentError("malformed halving schedule");
    }
    if (schedule.pool_sizes.front() != num_features) {
        throw ArgumentError("schedule starts at " + std::to_string(schedule.pool_sizes.front()) +
                            " features but the dataset has " + std::to_string(num_features));
    }
    if (k < 1 || k > schedule.pool_sizes.back()) {
        throw ArgumentError("k=" + std::to_string(k) + " exceeds the final pool size " +
                            std::to_string(schedule.pool_sizes.back()));
    }

    RampartResult result;
    result.schedule = schedule;
    result.k = k;
    IndexList pool = full_pool(num_features);
    for (Index t = 0; t < schedule.iterations; ++t) {
        RampOptions opts;
        opts.threads = threads;
        opts.stream_offset = iteration_stream_offset(t);
        result.trace.push_back(run_ramp(dataset, pool, ranker, schedule.budgets[t], n, m, master_seed, opts));
        if (t + 1 < schedule.iterations) pool = survivors(result.trace.back(), schedule.pool_sizes[t + 1]);
    }

    result.hat_r.assign(static_cast<std::size_t>(num_features), k);
    const RampResult& last = result.trace.back();
    for (std::size_t i = 0; i < last.pool().size(); ++i) result.hat_r[last.pool()[i]] = last.hat_r[i];
    return result;
}

inline RampartResult run_rampart(const Dataset& dataset, const RankerSpec& spec,
                                 const HalvingSchedule& schedule, Index n, Index m, Index k,
                                 std::uint64_t master_seed, unsigned threads = 1) {
    validate(spec);
    return run_rampart(dataset, SpecRanker{spec}, schedule, n, m, k, master_seed, threads);
}

// feature,count,bar_r,hat_r,survived for iteration t of a run.
inline std::string iteration_to_csv(const RampartResult& result, Index t, const Dataset& dataset) {
    const RampResult& it = result.trace.at(static_cast<std::size_t>(t));
    const bool last = t + 1 == static_cast<Index>(result.trace.size());
    const Index keep = last ? 0 : result.schedule.pool_sizes[t + 1];
    std::ostringstream out;
    out << "feature,count,bar_r,hat_r,survived\n";
    const auto& avg = it.averaged;
    for (std::size_t i = 0; i < avg.pool.size(); ++i) {
        const bool survived = last || it.hat_r[i] < keep;
        out << csv::quote(feature_label(dataset, avg.pool[i])) << ',' << avg.count[i] << ','
            << (avg.count[i] > 0 ? csv::format_double(avg.bar_r[i]) : std::string()) << ','
            << it.hat_r[i] << ',' << (survived ? "true" : "false") << '\n';
    }
    return out.str();
}

}  // namespace rampart
