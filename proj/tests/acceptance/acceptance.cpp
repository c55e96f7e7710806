// End-to-end acceptance gates. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
//
// usage: acceptance --cli <path to rampart binary> --workdir <scratch dir> [--only N]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rampart/all.hpp"

using namespace rampart;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    std::string cli;
    fs::path workdir;
};

std::vector<Index> shuffled_ranks(Index m, std::uint64_t seed) {
    std::vector<Index> truth(static_cast<std::size_t>(m));
    std::iota(truth.begin(), truth.end(), Index{0});
    Rng rng(seed);
    for (Index i = m - 1; i > 0; --i) std::swap(truth[i], truth[rng.uniform_below(i + 1)]);
    return truth;
}

Dataset noise_dataset(Index n, Index m, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.x.resize(n, m);
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) d.x(i, j) = rng.normal();
        d.y[i] = rng.normal();
    }
    return d;
}

double rbo_brute_force(const RankedList& est, const RankedList& truth, double rho, Index k) {
    double total = 0.0;
    for (Index s = 1; s <= k; ++s) {
        const std::set<Index> a(est.begin(), est.begin() + s);
        Index overlap = 0;
        for (Index i = 0; i < s; ++i) overlap += a.count(truth[i]);
        total += std::pow(rho, static_cast<double>(s - 1)) * static_cast<double>(overlap) / static_cast<double>(s);
    }
    return (1.0 - rho) * total;
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(digits);
    out << v;
    return out.str();
}

Outcome rbo_oracle(const Context&) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240101);
    double worst = 0.0;
    const double rhos[] = {0.5, 0.7, 0.9};
    for (int rep = 0; rep < 10000; ++rep) {
        const Index k = 1 + static_cast<Index>(rng.uniform_below(10));
        const Index universe = k + static_cast<Index>(rng.uniform_below(2 * k + 1));
        auto draw = [&] {
            RankedList all(static_cast<std::size_t>(universe));
            std::iota(all.begin(), all.end(), Index{0});
            for (Index i = 0; i < k; ++i) std::swap(all[i], all[i + rng.uniform_below(universe - i)]);
            all.resize(static_cast<std::size_t>(k));
            return all;
        };
        const auto a = draw();
        const auto b = draw();
        const double rho = rhos[rep % 3];
        worst = std::max(worst, std::abs(rbo(a, b, rho, k) - rbo_brute_force(a, b, rho, k)));
    }
    RankedList same(10);
    std::iota(same.begin(), same.end(), Index{0});
    const double ident_err = std::abs(rbo(same, same, 0.7, 10) - (1.0 - std::pow(0.7, 10)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream detail;
    detail << "max |diff| " << worst << ", identical-list error " << ident_err << ", " << fmt(secs, 2) << " s";
    return {worst <= 1e-12 && ident_err <= 1e-12 && secs < 10.0, detail.str()};
}

Outcome oracle_exactness(const Context&) {
    const Index m_total = 64;
    const Index k = 4;
    const Dataset d = noise_dataset(40, m_total, 1);
    const auto schedule = compute_schedule(m_total, k, 8, 4 * 2000);
    const IndexList pool = full_pool(m_total);
    int rampart_ok = 0;
    int ramp_ok = 0;
    for (int t = 0; t < 100; ++t) {
        const auto truth = shuffled_ranks(m_total, derive_seed(7, static_cast<std::uint64_t>(t)));
        const auto spec = RankerSpec::oracle(truth);
        const std::uint64_t seed = derive_seed(8, static_cast<std::uint64_t>(t));
        rampart_ok += exact_topk(run_rampart(d, spec, schedule, 10, 8, k, seed).hat_r, truth, k);
        ramp_ok += exact_topk(run_ramp(d, pool, spec, 10000, 10, 8, seed).hat_r, truth, k);
    }
    return {rampart_ok == 100 && ramp_ok == 100 && schedule.budgets.front() == 2000,
            "RAMPART " + std::to_string(rampart_ok) + "/100, RAMP " + std::to_string(ramp_ok) + "/100"};
}

Outcome hypergeometric(const Context&) {
    const Index pool_size = 40;
    const Index m = 10;
    const Dataset d = noise_dataset(20, pool_size, 2);
    const auto truth = shuffled_ranks(pool_size, 3);
    const IndexList pool = full_pool(pool_size);
    const RampResult r = run_ramp(d, pool, RankerSpec::oracle(truth), 20000, 5, m, 4);
    double worst_z = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double p = static_cast<double>(truth[i]) / (pool_size - 1);
        const double mean = (m - 1) * p;
        const double var = (m - 1) * p * (1 - p) * static_cast<double>(pool_size - m) / (pool_size - 2);
        const double se = std::sqrt(var / static_cast<double>(r.averaged.count[i]));
        const double diff = std::abs(r.averaged.bar_r[i] - mean);
        if (se == 0.0) {
            if (diff > 1e-12) worst_z = 1e9;
            continue;
        }
        worst_z = std::max(worst_z, diff / se);
    }
    return {worst_z <= 3.0, "largest deviation " + fmt(worst_z, 2) + " SE over 40 features"};
}

// Shared between criteria 4 and 6.
TheoryConfig theory_config() {
    TheoryConfig cfg;
    cfg.budgets = {256, 1024, 4096};
    cfg.trials = 200;
    cfg.master_seed = 0;
    return cfg;
}

Outcome theory_trend(const Context&) {
    const auto rows = validate_theory(theory_config());
    const std::size_t nb = 3;
    bool ok = true;
    std::ostringstream detail;
    for (std::size_t method = 0; method < 2; ++method) {
        detail << rows[method * nb].method << ":";
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& row = rows[method * nb + b];
            detail << ' ' << fmt(row.success.mean, 3);
            if (b > 0) {
                const auto& prev = rows[method * nb + b - 1];
                ok &= row.success.mean - prev.success.mean >= -2 * pooled_se(row.success, prev.success);
            }
        }
        detail << "; ";
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const auto& ramp = rows[b].success;
        const auto& rampart = rows[nb + b].success;
        ok &= rampart.mean >= ramp.mean - 2 * pooled_se(ramp, rampart);
    }
    detail << "budgets 256/1024/4096, 200 trials";
    return {ok, detail.str()};
}

Outcome desk_sanity(const Context&) {
    ExperimentConfig cfg;
    cfg.n_obs = 1000;
    cfg.n_features = 200;
    cfg.total_budgets = {10000};  // 2000 minipatches per halving iteration, T = 5
    cfg.trials = 30;
    cfg.methods = {Method::Rampart, Method::FullDataBaseline};
    const auto rows = run_simulation(cfg);
    std::vector<double> rampart_rbo;
    std::vector<double> full_rbo;
    for (const auto& r : rows) (r.method == "rampart" ? rampart_rbo : full_rbo).push_back(r.rbo);
    const Summary a = aggregate(rampart_rbo);
    const Summary f = aggregate(full_rbo);
    const bool floor_ok = a.mean >= 0.90;
    const double gate = f.mean - 2 * pooled_se(a, f);
    const bool baseline_ok = a.mean >= gate;
    return {floor_ok && baseline_ok, "RAMPART mean RBO " + fmt(a.mean) + " (SE " + fmt(a.standard_error) + ") " +
                                         (floor_ok ? ">=" : "<") + " 0.90; " + (baseline_ok ? ">=" : "<") +
                                         " full data " + fmt(f.mean) + " - 2 pooled SE = " + fmt(gate)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const Context& ctx) {
    const fs::path config = ctx.workdir / "determinism.ini";
    std::ofstream(config) << "[generator]\nfamily = appendix_b\n"
                             "[method]\nmethods = rampart, ramp\n"
                             "[budget]\ntotal_b = 256, 1024, 4096\nn = 80\nm = 20\nk = 4\n"
                             "[run]\ntrials = 200\nseed = 0\n";
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "8"}) {
        const fs::path out = ctx.workdir / (std::string("simulate_t") + threads + ".csv");
        const std::string cmd = ctx.cli + " simulate --config " + config.string() + " --threads " + threads +
                                " --out " + out.string() + " 2>/dev/null";
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "simulate exited abnormally"};
        outputs.push_back(slurp(out));
    }
    const auto lines = std::count(outputs[0].begin(), outputs[0].end(), '\n');
    return {!outputs[0].empty() && outputs[0] == outputs[1],
            std::to_string(lines - 1) + " rows, --threads 1 vs 8 " +
                (outputs[0] == outputs[1] ? "byte-identical" : "differ")};
}

Outcome noisy_oracle_knob(const Context&) {
    const Index m_total = 30;
    const auto truth = shuffled_ranks(m_total, 5);
    const IndexList pool = full_pool(m_total);
    Index correct = 0;
    Index pairs = 0;
    for (int b = 0; b < 100000; ++b) {
        Rng rng = derive_rng(6, static_cast<std::uint64_t>(b));
        const auto patch = sample_minipatch(pool, 10, 5, 6, rng, static_cast<std::uint64_t>(b));
        const auto r = noisy_oracle_rank(truth, patch.feats, 0.8, rng);
        for (std::size_t i = 0; i < patch.feats.size(); ++i) {
            for (std::size_t j = i + 1; j < patch.feats.size(); ++j) {
                const bool truth_order = truth[patch.feats[i]] < truth[patch.feats[j]];
                const bool est_order = r.ranks[i] < r.ranks[j];
                correct += truth_order == est_order;
                ++pairs;
            }
        }
    }
    const double freq = static_cast<double>(correct) / static_cast<double>(pairs);
    return {std::abs(freq - 0.9) <= 0.01, "pairwise-correct frequency " + fmt(freq) + " (target 0.9)"};
}

Outcome schedule_trace(const Context&) {
    const auto s = compute_schedule(500, 10, 10, 12000);
    const bool shape = s.iterations == 6 && s.pool_sizes == IndexList{500, 250, 125, 62, 31, 15};
    GenConfig g;
    g.n = 1000;
    g.m = 500;
    g.seed = 1;
    const auto synth = generate(g);
    const auto r = run_rampart(synth.dataset, RankerSpec::oracle(synth.truth.ranks), s, 125, 10, 10, 2);
    return {shape && r.total_patches() == 12000,
            "T=" + std::to_string(s.iterations) + ", total minipatches " + std::to_string(r.total_patches())};
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    int only = 0;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") ctx.cli = argv[i + 1];
        else if (flag == "--workdir") ctx.workdir = argv[i + 1];
        else if (flag == "--only") only = std::atoi(argv[i + 1]);
        else {
            std::cerr << "unknown argument " << flag << "\n";
            return 2;
        }
    }
    if (ctx.cli.empty() || ctx.workdir.empty()) {
        std::cerr << "usage: acceptance --cli <path> --workdir <dir> [--only N]\n";
        return 2;
    }
    fs::create_directories(ctx.workdir);

    const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria = {
        {"RBO matches brute force", rbo_oracle},
        {"oracle ranker gives exact top-k", oracle_exactness},
        {"mean within-patch rank is hypergeometric", hypergeometric},
        {"theory-check success trend", theory_trend},
        {"desk-scale RBO sanity", desk_sanity},
        {"simulate output is deterministic", determinism},
        {"noisy oracle pairwise accuracy", noisy_oracle_knob},
        {"halving schedule and budget conservation", schedule_trace},
    };
    int failures = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        if (only != 0 && static_cast<std::size_t>(only) != c + 1) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[c].second(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c + 1 << ": " << criteria[c].first << " ("
                  << o.detail << ") [" << fmt(secs, 1) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
