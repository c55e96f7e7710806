#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "rampart/data.hpp"
#include "rampart/error.hpp"

namespace rampart {

// Feature ids ordered best first.
using RankedList = std::vector<Index>;

/// Orders feature ids by ascending rank, ties by ascending id. Turns a rank vector
/// (including RAMPART output with its repeated sentinel) into a ranked list.
inline RankedList ranked_list(std::span<const Index> ranks) {
    RankedList order(ranks.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return ranks[a] < ranks[b]; });
    return order;
}

/// Truncated rank-biased overlap
///   (1 - rho) * sum_{s=1..k} rho^(s-1) * |est[0..s) ∩ truth[0..s)| / s.
/// Maximum (identical prefixes) is 1 - rho^k. Prefix overlaps are tracked
/// incrementally, so the cost is O(k).
inline double rbo(std::span<const Index> est, std::span<const Index> truth, double rho, Index k) {
    if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("rbo needs 0 < rho < 1");
    if (k < 1) throw ArgumentError("rbo needs k >= 1");
    if (static_cast<Index>(est.size()) < k || static_cast<Index>(truth.size()) < k) {
        throw ArgumentError("rbo needs both lists to have at least k=" + std::to_string(k) + " entries");
    }
    std::unordered_set<Index> seen_est;
    std::unordered_set<Index> seen_truth;
    for (Index s = 0; s < k; ++s) {
        if (!seen_est.insert(est[s]).second || !seen_truth.insert(truth[s]).second) {
            throw ArgumentError("rbo lists must not contain duplicate ids");
        }
    }
    seen_est.clear();
    seen_truth.clear();
    Index overlap = 0;
    double total = 0.0;
    double weight = 1.0;
    for (Index s = 0; s < k; ++s) {
        const Index a = est[s];
        const Index b = truth[s];
        if (a == b) {
            ++overlap;
        } else {
            if (seen_truth.count(a)) ++overlap;
            if (seen_est.count(b)) ++overlap;
        }
        seen_est.insert(a);
        seen_truth.insert(b);
        total += weight * static_cast<double>(overlap) / static_cast<double>(s + 1);
        weight *= rho;
    }
    return (1.0 - rho) * total;
}

/// True iff every feature in the true top-k gets exactly its true rank.
inline bool exact_topk(std::span<const Index> est_ranks, std::span<const Index> true_ranks, Index k) {
    if (est_ranks.size() != true_ranks.size()) {
        throw ArgumentError("rank vectors differ in length");
    }
    std::vector<bool> rank_used(static_cast<std::size_t>(std::max<Index>(k, 0)), false);
    Index members = 0;
    for (Index r : true_ranks) {
        if (r < 0 || r >= k) continue;
        if (rank_used[r]) throw ArgumentError("true top-k contains tied ranks");
        rank_used[r] = true;
        ++members;
    }
    if (members != k) throw ArgumentError("true ranks do not define a tie-free top-" + std::to_string(k));
    for (std::size_t j = 0; j < true_ranks.size(); ++j) {
        if (true_ranks[j] < k && est_ranks[j] != true_ranks[j]) return false;
    }
    return true;
}

struct Summary {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Sample mean and s / sqrt(n), with s the (n - 1)-normalized standard deviation.
inline Summary aggregate(std::span<const double> values) {
    if (values.size() < 2) throw ArgumentError("aggregate needs at least two trial values");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

// sqrt(se_a^2 + se_b^2), the yardstick for comparing two trial means.
inline double pooled_se(const Summary& a, const Summary& b) {
    return std::hypot(a.standard_error, b.standard_error);
}

}  // namespace rampart
