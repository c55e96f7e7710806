#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rampart/config.hpp"
#include "rampart/data.hpp"
#include "rampart/metrics.hpp"
#include "rampart/parallel.hpp"
#include "rampart/ramp.hpp"
#include "rampart/rampart.hpp"
#include "rampart/rankers.hpp"
#include "rampart/rng.hpp"
#include "rampart/synth.hpp"

namespace rampart {

struct ResultRow {
    std::string scenario;
    std::string covariance;
    double gamma = 0.0;
    Index budget = 0;  // grid value of total_b
    std::string method;
    Index trial = 0;
    double rbo = 0.0;
    bool exact_topk = false;
    Index total_minipatches = 0;
    std::uint64_t dataset_checksum = 0;
    double wall_time_ms = 0.0;
};

// Seeds of one trial: the dataset and the (shared) method stream.
struct TrialSeeds {
    std::uint64_t data;
    std::uint64_t method;
};

inline TrialSeeds trial_seeds(std::uint64_t master_seed, Index trial) {
    const std::uint64_t base = derive_seed(master_seed, static_cast<std::uint64_t>(trial));
    return {derive_seed(base, 0), derive_seed(base, 1)};
}

// One method's output on one dataset, in the shape the metrics need.
struct MethodRun {
    std::vector<Index> hat_r;
    Index minipatches = 0;
};

inline MethodRun run_method(Method method, const Dataset& data, const RankerSpec& ranker,
                            Index rampart_budget, Index ramp_budget, Allocation allocation,
                            Index n, Index m, Index k, std::uint64_t seed, unsigned threads = 1) {
    switch (method) {
        case Method::Rampart: {
            const HalvingSchedule schedule = compute_schedule(data.cols(), k, m, rampart_budget, allocation);
            RampartResult r = run_rampart(data, ranker, schedule, n, m, k, seed, threads);
            return {std::move(r.hat_r), r.total_patches()};
        }
        case Method::Ramp: {
            RampOptions opts;
            opts.threads = threads;
            const IndexList pool = full_pool(data.cols());
            RampResult r = run_ramp(data, pool, ranker, ramp_budget, n, m, seed, opts);
            return {std::move(r.hat_r), r.patches};
        }
        case Method::FullDataBaseline:
            return {rank_full_data(data, ranker, seed), 0};
    }
    throw ArgumentError("unknown method");
}

namespace detail {

struct GridPoint {
    Scenario scenario;
    Covariance covariance;
    double gamma;
    std::size_t budget_index;
};

inline std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
    std::vector<GridPoint> grid;
    for (auto s : cfg.scenarios)
        for (const auto& c : cfg.covariances)
            for (double g : cfg.gammas)
                for (std::size_t b = 0; b < cfg.total_budgets.size(); ++b) grid.push_back({s, c, g, b});
    return grid;
}

inline SynthDataset make_trial_data(const ExperimentConfig& cfg, const GridPoint& p, std::uint64_t seed) {
    if (cfg.family == GeneratorFamily::AppendixB) return gen_appendix_b(seed);
    GenConfig g;
    g.n = cfg.n_obs;
    g.m = cfg.n_features;
    g.covariance = p.covariance;
    g.gamma = p.gamma;
    g.scenario = p.scenario;
    g.seed = seed;
    return generate(g);
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << v;
    return out.str();
}

}  // namespace detail

/// Runs every (grid point, trial) of the experiment; within a trial all methods see
/// the same generated dataset and the same method seed. Rows come back ordered by
/// grid point, then method, then trial, independent of `threads`.
inline std::vector<ResultRow> run_simulation(const ExperimentConfig& cfg, unsigned threads = 1) {
    const auto grid = detail::expand_grid(cfg);
    const auto trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t methods = cfg.methods.size();
    std::vector<ResultRow> slots(grid.size() * methods * trials);

    parallel_for(grid.size() * trials, threads, [&](std::size_t job) {
        const std::size_t g = job / trials;
        const auto trial = static_cast<Index>(job % trials);
        const detail::GridPoint& point = grid[g];
        const TrialSeeds seeds = trial_seeds(cfg.master_seed, trial);
        const SynthDataset synth = detail::make_trial_data(cfg, point, seeds.data);
        const std::uint64_t checksum = rampart::checksum(synth.dataset);
        RankerSpec ranker = cfg.ranker;
        ranker.oracle_ranks = synth.truth.ranks;
        const RankedList truth = ranked_list(synth.truth.ranks);

        for (std::size_t mi = 0; mi < methods; ++mi) {
            const Method method = cfg.methods[mi];
            const auto start = std::chrono::steady_clock::now();
            const MethodRun run = run_method(method, synth.dataset, ranker, cfg.total_budgets[point.budget_index],
                                             cfg.ramp_budget(point.budget_index), cfg.allocation, cfg.n, cfg.m,
                                             cfg.k, seeds.method);
            const auto stop = std::chrono::steady_clock::now();
            ResultRow row;
            row.scenario = std::string(to_string(point.scenario));
            row.covariance = to_string(point.covariance);
            row.gamma = point.gamma;
            row.budget = cfg.total_budgets[point.budget_index];
            row.method = std::string(to_string(method));
            row.trial = trial;
            row.rbo = rbo(ranked_list(run.hat_r), truth, cfg.rbo_rho, cfg.k);
            row.exact_topk = exact_topk(run.hat_r, synth.truth.ranks, cfg.k);
            row.total_minipatches = run.minipatches;
            row.dataset_checksum = checksum;
            row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            slots[(g * methods + mi) * trials + static_cast<std::size_t>(trial)] = std::move(row);
        }
    });
    return slots;
}

inline std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "scenario,covariance,gamma,budget,method,trial,rbo,exact_topk,total_minipatches,dataset_checksum\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << csv::quote(r.covariance) << ',' << csv::format_double(r.gamma) << ','
            << r.budget << ',' << r.method << ',' << r.trial << ',' << csv::format_double(r.rbo) << ','
            << (r.exact_topk ? "true" : "false") << ',' << r.total_minipatches << ','
            << detail::hex64(r.dataset_checksum) << '\n';
    }
    return out.str();
}

// Wall-clock times live in a sidecar so the result CSV stays byte-reproducible.
inline std::string timings_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "scenario,covariance,gamma,budget,method,trial,wall_time_ms\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << csv::quote(r.covariance) << ',' << csv::format_double(r.gamma) << ','
            << r.budget << ',' << r.method << ',' << r.trial << ',' << std::fixed << std::setprecision(3)
            << r.wall_time_ms << std::defaultfloat << '\n';
    }
    return out.str();
}

/// Success-probability-versus-budget experiment on the Appendix B generator.
struct TheoryConfig {
    std::vector<Index> budgets{64, 256, 1024, 4096};
    Index trials = 500;
    double ramp_budget_multiplier = 1.0;
    RankerSpec ranker;  // OLS by default
    Index n = 80;
    Index m = 20;
    Index k = 4;
    std::uint64_t master_seed = 0;
};

struct TheoryRow {
    std::string method;
    Index budget = 0;             // RAMPART total, the matched-budget axis
    Index minipatches = 0;        // what this method actually consumed
    Index trials = 0;
    Index successes = 0;
    Summary success;
};

/// For every trial and budget runs RAMP and RAMPART on the same dataset and seed and
/// records exact top-k recovery. Rows: RAMP for each budget, then RAMPART.
inline std::vector<TheoryRow> validate_theory(const TheoryConfig& cfg, unsigned threads = 1) {
    if (cfg.trials < 2) throw ArgumentError("validate-theory needs at least two trials");
    if (cfg.budgets.empty()) throw ArgumentError("validate-theory needs at least one budget");
    if (!(cfg.ramp_budget_multiplier > 0.0)) throw ArgumentError("ramp budget multiplier must be > 0");
    const std::size_t nb = cfg.budgets.size();
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<Index> ramp_budgets(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        ramp_budgets[b] = std::max<Index>(1, static_cast<Index>(std::llround(
                                                 cfg.ramp_budget_multiplier * static_cast<double>(cfg.budgets[b]))));
        compute_schedule(kAppendixBFeatures, cfg.k, cfg.m, cfg.budgets[b]);
    }
    // outcome[(method * nb + b) * trials + t]
    std::vector<double> outcome(2 * nb * trials, 0.0);
    parallel_for(trials, threads, [&](std::size_t t) {
        const TrialSeeds seeds = trial_seeds(cfg.master_seed, static_cast<Index>(t));
        const SynthDataset synth = gen_appendix_b(seeds.data);
        RankerSpec ranker = cfg.ranker;
        ranker.oracle_ranks = synth.truth.ranks;
        for (std::size_t b = 0; b < nb; ++b) {
            const MethodRun ramp = run_method(Method::Ramp, synth.dataset, ranker, cfg.budgets[b], ramp_budgets[b],
                                              Allocation::Uniform, cfg.n, cfg.m, cfg.k, seeds.method);
            const MethodRun rampart = run_method(Method::Rampart, synth.dataset, ranker, cfg.budgets[b],
                                                 ramp_budgets[b], Allocation::Uniform, cfg.n, cfg.m, cfg.k,
                                                 seeds.method);
            outcome[(0 * nb + b) * trials + t] = exact_topk(ramp.hat_r, synth.truth.ranks, cfg.k) ? 1.0 : 0.0;
            outcome[(1 * nb + b) * trials + t] = exact_topk(rampart.hat_r, synth.truth.ranks, cfg.k) ? 1.0 : 0.0;
        }
    });

    std::vector<TheoryRow> rows;
    for (std::size_t method = 0; method < 2; ++method) {
        for (std::size_t b = 0; b < nb; ++b) {
            const auto begin = outcome.begin() + static_cast<std::ptrdiff_t>((method * nb + b) * trials);
            std::vector<double> values(begin, begin + static_cast<std::ptrdiff_t>(trials));
            TheoryRow row;
            row.method = method == 0 ? "ramp" : "rampart";
            row.budget = cfg.budgets[b];
            row.minipatches = method == 0 ? ramp_budgets[b] : cfg.budgets[b];
            row.trials = cfg.trials;
            for (double v : values) row.successes += v > 0.5 ? 1 : 0;
            row.success = aggregate(values);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline std::string theory_to_csv(const std::vector<TheoryRow>& rows) {
    std::ostringstream out;
    out << "method,budget,minipatches,trials,successes,success_mean,success_se\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.budget << ',' << r.minipatches << ',' << r.trials << ',' << r.successes
            << ',' << csv::format_double(r.success.mean) << ',' << csv::format_double(r.success.standard_error)
            << '\n';
    }
    return out.str();
}

/// Per-feature summary of a ranking run, as written by the `rank` command.
struct FeatureRanking {
    Index feature = 0;
    Index hat_r = 0;
    double bar_r = 0.0;  // from the last iteration the feature took part in; NaN if none
    Index count = 0;
    Index survived_iterations = 0;
};

struct RankRequest {
    Method method = Method::Rampart;
    RankerSpec ranker;
    Index k = 10;
    Index n = 125;
    Index m = 10;
    Index total_budget = 12000;
    Allocation allocation = Allocation::Uniform;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct RankOutput {
    std::vector<FeatureRanking> features;  // sorted by hat_r, then feature id
    std::vector<std::string> warnings;
    std::optional<RampartResult> rampart;  // kept for trace dumps
};

inline RankOutput rank_dataset(const Dataset& data, const RankRequest& req) {
    const Index num_features = data.cols();
    if (req.k < 1 || req.k > num_features) {
        throw ArgumentError("k=" + std::to_string(req.k) + " must lie in [1, M=" + std::to_string(num_features) + "]");
    }
    validate(req.ranker);
    RankOutput out;
    out.features.resize(static_cast<std::size_t>(num_features));
    for (Index j = 0; j < num_features; ++j) {
        out.features[j].feature = j;
        out.features[j].bar_r = std::numeric_limits<double>::quiet_NaN();
    }
    auto absorb = [&](const RampResult& it) {
        for (std::size_t i = 0; i < it.pool().size(); ++i) {
            auto& f = out.features[it.pool()[i]];
            f.bar_r = it.averaged.bar_r[i];
            f.count = it.averaged.count[i];
            f.survived_iterations += 1;
        }
        out.warnings.insert(out.warnings.end(), it.warnings.begin(), it.warnings.end());
    };

    switch (req.method) {
        case Method::FullDataBaseline: {
            const auto hat = rank_full_data(data, req.ranker, req.seed);
            for (Index j = 0; j < num_features; ++j) out.features[j].hat_r = hat[j];
            break;
        }
        case Method::Ramp: {
            RampOptions opts;
            opts.threads = req.threads;
            const IndexList pool = full_pool(num_features);
            const RampResult r = run_ramp(data, pool, req.ranker, req.total_budget, req.n, req.m, req.seed, opts);
            absorb(r);
            for (std::size_t i = 0; i < pool.size(); ++i) out.features[pool[i]].hat_r = r.hat_r[i];
            break;
        }
        case Method::Rampart: {
            const HalvingSchedule schedule = compute_schedule(num_features, req.k, req.m, req.total_budget, req.allocation);
            RampartResult r = run_rampart(data, req.ranker, schedule, req.n, req.m, req.k, req.seed, req.threads);
            for (const auto& it : r.trace) absorb(it);
            for (Index j = 0; j < num_features; ++j) out.features[j].hat_r = r.hat_r[j];
            out.rampart = std::move(r);
            break;
        }
    }
    std::stable_sort(out.features.begin(), out.features.end(),
                     [](const FeatureRanking& a, const FeatureRanking& b) { return a.hat_r < b.hat_r; });
    return out;
}

inline std::string ranking_to_csv(const RankOutput& out, const Dataset& data) {
    std::ostringstream csv_out;
    csv_out << "feature,hat_r,bar_r,count,survived_iterations\n";
    for (const auto& f : out.features) {
        csv_out << csv::quote(feature_label(data, f.feature)) << ',' << f.hat_r << ','
                << (f.count > 0 ? csv::format_double(f.bar_r) : std::string()) << ',' << f.count << ','
                << f.survived_iterations << '\n';
    }
    return csv_out.str();
}

}  // namespace rampart
