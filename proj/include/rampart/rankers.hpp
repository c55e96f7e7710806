#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rampart/data.hpp"
#include "rampart/error.hpp"
#include "rampart/linear_models.hpp"
#include "rampart/rng.hpp"
#include "rampart/sampling.hpp"
#include "rampart/tree_mdi.hpp"

namespace rampart {

/// Within-minipatch ranks aligned with MinipatchIndex::feats (rank 0 = most important).
/// `degenerate` marks patches whose scores were all tied because the response was
/// constant; those ranks are plain index order.
struct RankVector {
    std::vector<Index> ranks;
    bool degenerate = false;
};

enum class RankerKind { OlsCoef, LogisticCoef, TreeMdi, Oracle, NoisyOracle };

inline std::string_view to_string(RankerKind kind) {
    switch (kind) {
        case RankerKind::OlsCoef: return "ols";
        case RankerKind::LogisticCoef: return "logistic";
        case RankerKind::TreeMdi: return "tree_mdi";
        case RankerKind::Oracle: return "oracle";
        case RankerKind::NoisyOracle: return "noisy_oracle";
    }
    return "unknown";
}

inline RankerKind parse_ranker_kind(std::string_view name) {
    for (auto kind : {RankerKind::OlsCoef, RankerKind::LogisticCoef, RankerKind::TreeMdi,
                      RankerKind::Oracle, RankerKind::NoisyOracle}) {
        if (to_string(kind) == name) return kind;
    }
    throw ArgumentError("unknown ranker '" + std::string(name) +
                        "' (expected ols, logistic, tree_mdi, oracle or noisy_oracle)");
}

/// The ranking procedure applied to each minipatch, with its hyperparameters.
/// Oracle kinds read the global ground-truth ranks from `oracle_ranks`.
struct RankerSpec {
    RankerKind kind = RankerKind::OlsCoef;
    LogisticOptions logistic;
    TreeOptions tree;
    std::vector<Index> oracle_ranks;
    double p_correct = 1.0;

    static RankerSpec ols() { return {}; }
    static RankerSpec oracle(std::vector<Index> truth) {
        RankerSpec s;
        s.kind = RankerKind::Oracle;
        s.oracle_ranks = std::move(truth);
        return s;
    }
    static RankerSpec noisy_oracle(std::vector<Index> truth, double p_correct) {
        RankerSpec s;
        s.kind = RankerKind::NoisyOracle;
        s.oracle_ranks = std::move(truth);
        s.p_correct = p_correct;
        return s;
    }
};

inline void validate(const RankerSpec& spec) {
    switch (spec.kind) {
        case RankerKind::LogisticCoef:
            if (spec.logistic.iterations < 1 || !(spec.logistic.step > 0.0)) {
                throw ArgumentError("logistic ranker needs iterations >= 1 and step > 0");
            }
            break;
        case RankerKind::TreeMdi:
            if (spec.tree.max_depth < 1 || spec.tree.min_samples_split < 2) {
                throw ArgumentError("tree ranker needs max_depth >= 1 and min_samples_split >= 2");
            }
            break;
        case RankerKind::NoisyOracle:
            if (!(spec.p_correct > 0.5 && spec.p_correct <= 1.0)) {
                throw ArgumentError("p_correct must lie in (1/2, 1], got " +
                                    std::to_string(spec.p_correct));
            }
            [[fallthrough]];
        case RankerKind::Oracle:
            if (spec.oracle_ranks.empty()) {
                throw ArgumentError("oracle rankers need the ground-truth ranks");
            }
            break;
        case RankerKind::OlsCoef:
            break;
    }
}

// Sub-block of the data seen by one minipatch fit (column-major for the solvers).
struct PatchData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::span<const Index> feats;
    Task task = Task::Regression;
};

inline PatchData extract_patch(const Dataset& d, const MinipatchIndex& patch) {
    PatchData p;
    p.x.resize(static_cast<Eigen::Index>(patch.obs.size()),
               static_cast<Eigen::Index>(patch.feats.size()));
    p.y.resize(static_cast<Eigen::Index>(patch.obs.size()));
    for (std::size_t c = 0; c < patch.feats.size(); ++c) {
        const Index f = patch.feats[c];
        for (std::size_t r = 0; r < patch.obs.size(); ++r) {
            p.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = d.x(patch.obs[r], f);
        }
    }
    for (std::size_t r = 0; r < patch.obs.size(); ++r) {
        p.y[static_cast<Eigen::Index>(r)] = d.y[patch.obs[r]];
    }
    p.feats = patch.feats;
    p.task = d.task;
    return p;
}

/// Ranks by descending |score|; equal magnitudes keep ascending position order.
inline RankVector score_to_rank(std::span<const double> scores) {
    std::vector<Index> order(scores.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(scores[a]) > std::abs(scores[b]);
    });
    RankVector out;
    out.ranks.resize(scores.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        out.ranks[order[pos]] = static_cast<Index>(pos);
    }
    return out;
}

inline RankVector score_to_rank(const Eigen::VectorXd& scores) {
    return score_to_rank(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
}

/// Restriction of the global ground-truth order to `feats`. Features tied in the
/// truth fall back to ascending feature id.
inline RankVector oracle_rank(std::span<const Index> true_ranks, std::span<const Index> feats) {
    std::vector<Index> order(feats.size());
    std::iota(order.begin(), order.end(), Index{0});
    for (Index f : feats) {
        if (f < 0 || f >= static_cast<Index>(true_ranks.size())) {
            throw ArgumentError("feature " + std::to_string(f) + " outside the oracle's truth vector");
        }
    }
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Index ra = true_ranks[feats[a]];
        const Index rb = true_ranks[feats[b]];
        return ra < rb || (ra == rb && feats[a] < feats[b]);
    });
    RankVector out;
    out.ranks.resize(feats.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        out.ranks[order[pos]] = static_cast<Index>(pos);
    }
    return out;
}

/// With probability p_correct the oracle order, otherwise a uniformly random
/// permutation. A pair ordered correctly by the truth therefore comes out in the
/// right order with probability p_correct + (1 - p_correct) / 2.
inline RankVector noisy_oracle_rank(std::span<const Index> true_ranks, std::span<const Index> feats,
                                    double p_correct, Rng& rng) {
    if (!(p_correct > 0.5 && p_correct <= 1.0)) {
        throw ArgumentError("p_correct must lie in (1/2, 1], got " + std::to_string(p_correct));
    }
    if (rng.bernoulli(p_correct)) return oracle_rank(true_ranks, feats);
    RankVector out;
    out.ranks.resize(feats.size());
    std::iota(out.ranks.begin(), out.ranks.end(), Index{0});
    for (std::size_t i = out.ranks.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(out.ranks[i - 1], out.ranks[j]);
    }
    return out;
}

namespace detail {

inline bool is_constant(const Eigen::VectorXd& y) {
    return y.size() == 0 || (y.array() == y[0]).all();
}

inline void check_finite(const PatchData& patch) {
    if (!patch.x.allFinite() || !patch.y.allFinite()) {
        throw DataError("minipatch contains non-finite values");
    }
}

}  // namespace detail

/// Importance scores of a model fit to (x, y); larger magnitude = more important.
/// Only defined for the model-based kinds.
inline Eigen::VectorXd importance_scores(const RankerSpec& spec, const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& y, Task task) {
    switch (spec.kind) {
        case RankerKind::OlsCoef: return ols_coefficients(x, y);
        case RankerKind::LogisticCoef: return logistic_coefficients(x, y, spec.logistic);
        case RankerKind::TreeMdi: return tree_mdi_importance(x, y, task, spec.tree);
        default: break;
    }
    throw ArgumentError("ranker '" + std::string(to_string(spec.kind)) + "' has no importance scores");
}

/// One application of the ranking procedure to a minipatch.
inline RankVector rank_minipatch(const RankerSpec& spec, const PatchData& patch, Rng& rng) {
    switch (spec.kind) {
        case RankerKind::Oracle: return oracle_rank(spec.oracle_ranks, patch.feats);
        case RankerKind::NoisyOracle:
            return noisy_oracle_rank(spec.oracle_ranks, patch.feats, spec.p_correct, rng);
        default: break;
    }
    detail::check_finite(patch);
    if (spec.kind == RankerKind::LogisticCoef && patch.task != Task::Classification) {
        throw ArgumentError("logistic ranker requires a classification dataset");
    }
    if (detail::is_constant(patch.y)) {
        RankVector out;
        out.ranks.resize(static_cast<std::size_t>(patch.x.cols()));
        std::iota(out.ranks.begin(), out.ranks.end(), Index{0});
        out.degenerate = true;
        return out;
    }
    return score_to_rank(importance_scores(spec, patch.x, patch.y, patch.task));
}

// Anything callable like rank_minipatch can drive the ensembles.
template <class R>
concept MinipatchRanker = requires(const R& ranker, const PatchData& patch, Rng& rng) {
    { ranker(patch, rng) } -> std::convertible_to<RankVector>;
};

// Adapts a RankerSpec to the MinipatchRanker interface.
struct SpecRanker {
    const RankerSpec& spec;
    RankVector operator()(const PatchData& patch, Rng& rng) const {
        return rank_minipatch(spec, patch, rng);
    }
};

}  // namespace rampart
