// Command-line front end: simulate, validate-theory, rank, generate.
//
// Exit codes: 0 success, 2 configuration/argument error, 3 data error, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rampart/all.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::vector<rampart::Index> parse_index_list(const std::string& text) {
    std::vector<rampart::Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = rampart::csv::parse_double(item);
        if (!v || *v != static_cast<double>(static_cast<rampart::Index>(*v))) {
            throw rampart::ArgumentError("'" + item + "' is not an integer");
        }
        out.push_back(static_cast<rampart::Index>(*v));
    }
    if (out.empty()) throw rampart::ArgumentError("empty list");
    return out;
}

// feature,phi,rank as written next to generated datasets.
std::string truth_to_csv(const rampart::TrueImportance& truth) {
    std::ostringstream out;
    out << "feature,phi,rank\n";
    for (std::size_t j = 0; j < truth.phi.size(); ++j) {
        out << j << ',' << rampart::csv::format_double(truth.phi[j]) << ',' << truth.ranks[j] << '\n';
    }
    return out.str();
}

// Reads the phi column of a truth file and recomputes ranks from it.
std::vector<rampart::Index> read_truth_ranks(const std::string& path, rampart::Index num_features) {
    std::ifstream in(path);
    if (!in) throw rampart::DataError("cannot open truth file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> phi;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("feature", 0) == 0) continue;
        auto fields = rampart::csv::split_line(line);
        if (!fields || fields->size() < 2) {
            throw rampart::DataError("truth file line " + std::to_string(line_no) + ": expected feature,phi");
        }
        auto v = rampart::csv::parse_double((*fields)[1]);
        if (!v) throw rampart::DataError("truth file line " + std::to_string(line_no) + ": bad phi value");
        phi.push_back(*v);
    }
    if (static_cast<rampart::Index>(phi.size()) != num_features) {
        throw rampart::DataError("truth file lists " + std::to_string(phi.size()) + " features, data has " +
                                 std::to_string(num_features));
    }
    return rampart::true_ranks(phi);
}

void write_output(const std::string& path, const std::string& contents) {
    if (path == "-") {
        std::cout << contents;
        return;
    }
    rampart::csv::write_atomically(path, contents);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Top-k feature importance ranking with minipatch ensembles (RAMP) and recursive halving (RAMPART)"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a synthetic benchmark sweep described by a config file");
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    unsigned threads = 1;
    std::optional<std::string> out_override;
    simulate->add_option("--config", config_path, "Experiment config file")->required();
    simulate->add_option("--seed", seed_override, "Override run.seed");
    simulate->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    simulate->add_option("--out", out_override, "Override run.output");
    simulate->footer("Config file keys (sectioned 'key = value', '#' comments, unknown keys rejected):\n" +
                     rampart::config_reference());

    // validate-theory
    auto* theory = app.add_subcommand("validate-theory", "Success probability versus minipatch budget, RAMP vs RAMPART");
    std::string preset = "appendix-b";
    std::string budgets_text = "64,256,1024,4096";
    rampart::Index theory_trials = 500;
    double multiplier = 1.0;
    std::string theory_ranker = "ols";
    std::uint64_t theory_seed = 0;
    std::string theory_out = "theory.csv";
    theory->add_option("--preset", preset, "Experiment preset")->check(CLI::IsMember({"appendix-b"}));
    theory->add_option("--budgets", budgets_text, "Comma-separated RAMPART total budgets");
    theory->add_option("--trials", theory_trials, "Trials per budget");
    theory->add_option("--ramp-budget-multiplier", multiplier, "RAMP budget = multiplier * budget");
    theory->add_option("--ranker", theory_ranker, "ols | logistic | tree_mdi | oracle");
    theory->add_option("--seed", theory_seed, "Master seed");
    theory->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    theory->add_option("--out", theory_out, "Output CSV ('-' for stdout)");

    // rank
    auto* rank = app.add_subcommand("rank", "Rank the features of a CSV dataset (last column = response)");
    std::string data_path;
    bool has_header = false;
    std::string task_name = "regression";
    std::string ranker_name = "ols";
    std::string method_name = "rampart";
    std::string allocation_name = "uniform";
    rampart::RankRequest req;
    double p_correct = 0.8;
    std::string truth_path;
    std::string rank_out = "-";
    std::string trace_dir;
    rank->add_option("--data", data_path, "Input CSV")->required();
    rank->add_flag("--header", has_header, "First CSV row holds column names");
    rank->add_option("--task", task_name, "regression | classification")
        ->check(CLI::IsMember({"regression", "classification"}));
    rank->add_option("--ranker", ranker_name, "ols | logistic | tree_mdi | oracle | noisy_oracle");
    rank->add_option("--method", method_name, "rampart | ramp | full_data");
    rank->add_option("--k", req.k, "Number of top features");
    auto* n_opt = rank->add_option("--n", req.n, "Observations per minipatch");
    auto* m_opt = rank->add_option("--m", req.m, "Features per minipatch");
    auto* b_opt = rank->add_option("--total-b", req.total_budget, "Total minipatch budget");
    rank->add_option("--allocation", allocation_name, "uniform | geometric");
    rank->add_option("--p-correct", p_correct, "noisy_oracle accuracy in (1/2, 1]");
    rank->add_option("--truth", truth_path, "Ground-truth file (feature,phi,...) for oracle rankers");
    rank->add_option("--seed", req.seed, "Master seed");
    rank->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    rank->add_option("--out", rank_out, "Output CSV ('-' for stdout)");
    rank->add_option("--trace-dir", trace_dir, "Write one CSV per RAMPART iteration here");

    // generate
    auto* generate = app.add_subcommand("generate", "Export a synthetic dataset and its ground truth");
    std::string gen_preset = "standard";
    rampart::GenConfig gen;
    std::string scenario_name = "linear_regression";
    std::string covariance_name = "identity";
    std::string gen_out = "data.csv";
    generate->add_option("--preset", gen_preset, "standard | appendix-b")
        ->check(CLI::IsMember({"standard", "appendix-b"}));
    generate->add_option("--n-obs", gen.n, "Observations N");
    generate->add_option("--n-features", gen.m, "Features M (>= 10)");
    generate->add_option("--scenario", scenario_name, "linear_regression | nonlinear_regression | linear_classification | nonlinear_classification");
    generate->add_option("--covariance", covariance_name, "identity | ar1(rho)");
    generate->add_option("--gamma", gen.gamma, "Coefficient ladder scale");
    generate->add_option("--seed", gen.seed, "Seed");
    generate->add_option("--out", gen_out, "Output CSV; ground truth goes to <out>.truth.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            rampart::ExperimentConfig cfg = rampart::parse_config_file(config_path);
            if (seed_override) cfg.master_seed = *seed_override;
            if (out_override) cfg.output_path = *out_override;
            const auto rows = rampart::run_simulation(cfg, threads);
            write_output(cfg.output_path, rampart::results_to_csv(rows));
            if (cfg.output_path != "-") {
                rampart::csv::write_atomically(cfg.output_path + ".timing.csv", rampart::timings_to_csv(rows));
            }
            std::cerr << "wrote " << rows.size() << " rows to " << cfg.output_path << "\n";
        } else if (theory->parsed()) {
            rampart::TheoryConfig cfg;
            cfg.budgets = parse_index_list(budgets_text);
            cfg.trials = theory_trials;
            cfg.ramp_budget_multiplier = multiplier;
            cfg.ranker.kind = rampart::parse_ranker_kind(theory_ranker);
            if (cfg.ranker.kind == rampart::RankerKind::NoisyOracle) {
                throw rampart::ArgumentError("validate-theory does not take noisy_oracle");
            }
            cfg.master_seed = theory_seed;
            const auto rows = rampart::validate_theory(cfg, threads);
            write_output(theory_out, rampart::theory_to_csv(rows));
        } else if (rank->parsed()) {
            req.method = rampart::parse_method(method_name);
            req.ranker.kind = rampart::parse_ranker_kind(ranker_name);
            req.ranker.p_correct = p_correct;
            req.allocation = rampart::parse_allocation(allocation_name);
            req.threads = threads;
            rampart::CsvReadOptions opts;
            opts.has_header = has_header;
            opts.task = task_name == "classification" ? rampart::Task::Classification : rampart::Task::Regression;
            // Cheap checks first, before the data is even read.
            if (req.k < 1) throw rampart::ArgumentError("--k must be >= 1");
            const rampart::Dataset data = rampart::read_dataset_csv(data_path, opts);
            if (req.k > data.cols()) {
                throw rampart::ArgumentError("--k " + std::to_string(req.k) + " exceeds the " +
                                             std::to_string(data.cols()) + " features in the data");
            }
            if (req.ranker.kind == rampart::RankerKind::Oracle || req.ranker.kind == rampart::RankerKind::NoisyOracle) {
                if (truth_path.empty()) throw rampart::ArgumentError("oracle rankers need --truth");
                req.ranker.oracle_ranks = read_truth_ranks(truth_path, data.cols());
            }
            if (req.method == rampart::Method::FullDataBaseline &&
                (n_opt->count() > 0 || m_opt->count() > 0 || b_opt->count() > 0)) {
                std::cerr << "warning: full_data ignores --n, --m and --total-b\n";
            }
            const rampart::RankOutput out = rampart::rank_dataset(data, req);
            for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
            write_output(rank_out, rampart::ranking_to_csv(out, data));
            if (!trace_dir.empty() && out.rampart) {
                std::filesystem::create_directories(trace_dir);
                for (rampart::Index t = 0; t < static_cast<rampart::Index>(out.rampart->trace.size()); ++t) {
                    const auto path = std::filesystem::path(trace_dir) / ("iteration_" + std::to_string(t) + ".csv");
                    rampart::csv::write_atomically(path, rampart::iteration_to_csv(*out.rampart, t, data));
                }
            }
        } else if (generate->parsed()) {
            rampart::SynthDataset synth;
            if (gen_preset == "appendix-b") {
                synth = rampart::gen_appendix_b(gen.seed);
            } else {
                gen.scenario = rampart::parse_scenario(scenario_name);
                gen.covariance = rampart::detail::parse_covariance(covariance_name);
                synth = rampart::generate(gen);
            }
            write_output(gen_out, rampart::to_csv(synth.dataset));
            if (gen_out != "-") rampart::csv::write_atomically(gen_out + ".truth.csv", truth_to_csv(synth.truth));
        }
    } catch (const rampart::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rampart::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rampart::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
