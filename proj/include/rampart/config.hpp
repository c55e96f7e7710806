#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rampart/csv.hpp"
#include "rampart/error.hpp"
#include "rampart/rampart.hpp"
#include "rampart/rankers.hpp"
#include "rampart/synth.hpp"

namespace rampart {

enum class Method { Rampart, Ramp, FullDataBaseline };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::Rampart: return "rampart";
        case Method::Ramp: return "ramp";
        case Method::FullDataBaseline: return "full_data";
    }
    return "unknown";
}

inline Method parse_method(std::string_view name) {
    if (name == "rampart") return Method::Rampart;
    if (name == "ramp") return Method::Ramp;
    if (name == "full_data") return Method::FullDataBaseline;
    throw ArgumentError("unknown method '" + std::string(name) + "' (expected rampart, ramp or full_data)");
}

enum class GeneratorFamily { Standard, AppendixB };

/// Everything `simulate` needs. Grid axes are the scenario, covariance, gamma and
/// total-budget lists; every grid point runs `trials` trials of every method.
struct ExperimentConfig {
    GeneratorFamily family = GeneratorFamily::Standard;
    Index n_obs = 1000;
    Index n_features = 500;
    std::vector<Scenario> scenarios{Scenario::LinearRegression};
    std::vector<Covariance> covariances{Covariance::identity()};
    std::vector<double> gammas{0.5};

    std::vector<Method> methods{Method::Rampart, Method::Ramp, Method::FullDataBaseline};
    RankerSpec ranker;

    std::vector<Index> total_budgets{12000};
    std::vector<Index> ramp_budgets;  // optional, one per total budget
    double ramp_budget_multiplier = 1.0;
    Allocation allocation = Allocation::Uniform;
    Index n = 125;
    Index m = 10;
    Index k = 10;

    Index trials = 100;
    std::uint64_t master_seed = 0;
    double rbo_rho = 0.7;
    std::string output_path = "results.csv";

    // Minipatches RAMP gets at grid budget index b.
    Index ramp_budget(std::size_t b) const {
        if (!ramp_budgets.empty()) return ramp_budgets.at(b);
        return std::max<Index>(1, static_cast<Index>(std::llround(ramp_budget_multiplier *
                                                                  static_cast<double>(total_budgets.at(b)))));
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Comma-separated items; parentheses protect commas (for "ar1(0.5)").
inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> items;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    items.push_back(trim(cur));
    return items;
}

inline double to_double(const std::string& s) {
    auto v = csv::parse_double(s);
    if (!v) throw ArgumentError("'" + s + "' is not a number");
    return *v;
}

inline Index to_index(const std::string& s) {
    const double v = to_double(s);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ArgumentError("'" + s + "' is not an integer");
    return static_cast<Index>(v);
}

inline std::uint64_t to_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ArgumentError("'" + s + "' is not an unsigned integer");
    }
    return v;
}

inline bool to_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ArgumentError("'" + s + "' is not true/false");
}

inline Covariance parse_covariance(const std::string& s) {
    if (s == "identity") return Covariance::identity();
    if (s.rfind("ar1(", 0) == 0 && s.back() == ')') {
        const double rho = to_double(trim(std::string_view(s).substr(4, s.size() - 5)));
        if (!(rho >= 0.0 && rho < 1.0)) throw ArgumentError("ar1 rho must lie in [0, 1)");
        return Covariance::ar1(rho);
    }
    throw ArgumentError("unknown covariance '" + s + "' (expected identity or ar1(rho))");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& value, Parse parse) {
    std::vector<T> out;
    for (const auto& item : split_list(value)) {
        if (item.empty()) throw ArgumentError("empty list entry");
        out.push_back(parse(item));
    }
    return out;
}

struct KeyDoc {
    const char* section;
    const char* key;
    const char* help;
};

}  // namespace detail

// Every accepted key; printed by `--help` and used to reject unknown keys.
inline const std::vector<detail::KeyDoc>& config_keys() {
    static const std::vector<detail::KeyDoc> keys = {
        {"generator", "family", "standard | appendix_b (N=1000, M=160, beta=(4,3,2,1)*0.22)"},
        {"generator", "n_obs", "observations N (standard family)"},
        {"generator", "n_features", "features M >= 10 (standard family)"},
        {"generator", "scenarios", "list of linear_regression, nonlinear_regression, linear_classification, nonlinear_classification"},
        {"generator", "covariances", "list of identity, ar1(rho)"},
        {"generator", "gammas", "list of coefficient-ladder scales gamma > 0"},
        {"method", "methods", "list of rampart, ramp, full_data"},
        {"ranker", "kind", "ols | logistic | tree_mdi | oracle | noisy_oracle"},
        {"ranker", "logistic_iterations", "gradient-descent iterations (default 200)"},
        {"ranker", "logistic_step", "gradient-descent step size (default 0.1)"},
        {"ranker", "tree_max_depth", "CART depth limit (default 5)"},
        {"ranker", "tree_min_samples_split", "smallest node that may be split (default 10)"},
        {"ranker", "p_correct", "noisy_oracle probability of emitting the true order, in (1/2, 1]"},
        {"budget", "total_b", "list of RAMPART total minipatch budgets (grid axis)"},
        {"budget", "ramp_total_b", "optional list of RAMP budgets, one per total_b entry"},
        {"budget", "ramp_budget_multiplier", "RAMP budget = multiplier * total_b when ramp_total_b is absent (default 1)"},
        {"budget", "allocation", "uniform | geometric split of total_b across halving iterations"},
        {"budget", "n", "observations per minipatch"},
        {"budget", "m", "features per minipatch"},
        {"budget", "k", "number of top features to rank"},
        {"run", "trials", "trials per grid point (>= 1)"},
        {"run", "seed", "master seed (unsigned 64-bit)"},
        {"run", "rbo_rho", "RBO depth weight in (0, 1) (default 0.7)"},
        {"run", "output", "result CSV path"},
    };
    return keys;
}

inline std::string config_reference() {
    std::ostringstream out;
    std::string section;
    for (const auto& k : config_keys()) {
        if (section != k.section) {
            section = k.section;
            out << "[" << section << "]\n";
        }
        out << "  " << k.key << " = ...   " << k.help << "\n";
    }
    return out.str();
}

/// Parses the sectioned key = value format. '#' starts a comment. Unknown sections
/// or keys, duplicates and bad values are ConfigErrors naming the line.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    bool ramp_total_given = false;

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string text = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (text.empty()) continue;
        auto fail = [&](const std::string& msg) -> ConfigError {
            return ConfigError("config line " + std::to_string(line_no) + ": " + msg);
        };
        if (text.front() == '[') {
            if (text.back() != ']') throw fail("malformed section header '" + text + "'");
            section = detail::trim(std::string_view(text).substr(1, text.size() - 2));
            bool known = false;
            for (const auto& k : config_keys()) known = known || section == k.section;
            if (!known) throw fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw fail("expected 'key = value'");
        const std::string key = detail::trim(std::string_view(text).substr(0, eq));
        const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
        if (section.empty()) throw fail("key '" + key + "' outside any section");
        bool known = false;
        for (const auto& k : config_keys()) known = known || (section == k.section && key == k.key);
        if (!known) throw fail("unknown key '" + key + "' in [" + section + "]");
        const std::string qualified = section + "." + key;
        if (seen.count(qualified)) {
            throw fail("duplicate key '" + qualified + "' (first set on line " +
                       std::to_string(seen[qualified]) + ")");
        }
        seen[qualified] = line_no;
        if (value.empty()) throw fail("empty value for '" + qualified + "'");

        try {
            if (qualified == "generator.family") {
                if (value == "standard") cfg.family = GeneratorFamily::Standard;
                else if (value == "appendix_b") cfg.family = GeneratorFamily::AppendixB;
                else throw ArgumentError("expected standard or appendix_b");
            } else if (qualified == "generator.n_obs") {
                cfg.n_obs = detail::to_index(value);
            } else if (qualified == "generator.n_features") {
                cfg.n_features = detail::to_index(value);
            } else if (qualified == "generator.scenarios") {
                cfg.scenarios = detail::parse_list<Scenario>(value, [](const std::string& s) { return parse_scenario(s); });
            } else if (qualified == "generator.covariances") {
                cfg.covariances = detail::parse_list<Covariance>(value, detail::parse_covariance);
            } else if (qualified == "generator.gammas") {
                cfg.gammas = detail::parse_list<double>(value, detail::to_double);
            } else if (qualified == "method.methods") {
                cfg.methods = detail::parse_list<Method>(value, [](const std::string& s) { return parse_method(s); });
            } else if (qualified == "ranker.kind") {
                cfg.ranker.kind = parse_ranker_kind(value);
            } else if (qualified == "ranker.logistic_iterations") {
                cfg.ranker.logistic.iterations = static_cast<int>(detail::to_index(value));
            } else if (qualified == "ranker.logistic_step") {
                cfg.ranker.logistic.step = detail::to_double(value);
            } else if (qualified == "ranker.tree_max_depth") {
                cfg.ranker.tree.max_depth = static_cast<int>(detail::to_index(value));
            } else if (qualified == "ranker.tree_min_samples_split") {
                cfg.ranker.tree.min_samples_split = static_cast<int>(detail::to_index(value));
            } else if (qualified == "ranker.p_correct") {
                cfg.ranker.p_correct = detail::to_double(value);
            } else if (qualified == "budget.total_b") {
                cfg.total_budgets = detail::parse_list<Index>(value, detail::to_index);
            } else if (qualified == "budget.ramp_total_b") {
                cfg.ramp_budgets = detail::parse_list<Index>(value, detail::to_index);
                ramp_total_given = true;
            } else if (qualified == "budget.ramp_budget_multiplier") {
                cfg.ramp_budget_multiplier = detail::to_double(value);
            } else if (qualified == "budget.allocation") {
                cfg.allocation = parse_allocation(value);
            } else if (qualified == "budget.n") {
                cfg.n = detail::to_index(value);
            } else if (qualified == "budget.m") {
                cfg.m = detail::to_index(value);
            } else if (qualified == "budget.k") {
                cfg.k = detail::to_index(value);
            } else if (qualified == "run.trials") {
                cfg.trials = detail::to_index(value);
            } else if (qualified == "run.seed") {
                cfg.master_seed = detail::to_u64(value);
            } else if (qualified == "run.rbo_rho") {
                cfg.rbo_rho = detail::to_double(value);
            } else if (qualified == "run.output") {
                cfg.output_path = value;
            }
        } catch (const ArgumentError& e) {
            throw fail(qualified + ": " + e.what());
        }
    }

    auto invalid = [](const std::string& msg) { return ConfigError("config: " + msg); };
    if (cfg.family == GeneratorFamily::AppendixB) {
        for (const char* k : {"generator.n_obs", "generator.n_features", "generator.scenarios",
                              "generator.covariances", "generator.gammas"}) {
            if (seen.count(k)) throw invalid(std::string(k) + " does not apply to the appendix_b family");
        }
        cfg.n_obs = kAppendixBRows;
        cfg.n_features = kAppendixBFeatures;
        cfg.scenarios = {Scenario::LinearRegression};
        cfg.covariances = {Covariance::identity()};
        cfg.gammas = {kAppendixBScale};
    }
    if (cfg.trials < 1) throw invalid("run.trials must be >= 1");
    if (cfg.scenarios.empty() || cfg.covariances.empty() || cfg.gammas.empty() ||
        cfg.methods.empty() || cfg.total_budgets.empty()) {
        throw invalid("grid lists must be nonempty");
    }
    if (cfg.n_obs < 1) throw invalid("generator.n_obs must be >= 1");
    if (cfg.family == GeneratorFamily::Standard && cfg.n_features < kSignalFeatures) {
        throw invalid("generator.n_features must be >= 10");
    }
    for (double g : cfg.gammas) {
        if (!(g > 0.0)) throw invalid("generator.gammas entries must be > 0");
    }
    if (ramp_total_given && cfg.ramp_budgets.size() != cfg.total_budgets.size()) {
        throw invalid("budget.ramp_total_b needs one entry per budget.total_b entry");
    }
    if (ramp_total_given && seen.count("budget.ramp_budget_multiplier")) {
        throw invalid("set either budget.ramp_total_b or budget.ramp_budget_multiplier, not both");
    }
    if (!(cfg.ramp_budget_multiplier > 0.0)) throw invalid("budget.ramp_budget_multiplier must be > 0");
    for (Index b : cfg.ramp_budgets) {
        if (b < 1) throw invalid("budget.ramp_total_b entries must be >= 1");
    }
    if (cfg.n < 1 || cfg.n > cfg.n_obs) throw invalid("budget.n must lie in [1, n_obs]");
    if (cfg.m < 1) throw invalid("budget.m must be >= 1");
    if (cfg.k < 1 || cfg.k > cfg.n_features) throw invalid("budget.k must lie in [1, n_features]");
    if (cfg.family == GeneratorFamily::Standard && cfg.k > kSignalFeatures) {
        throw invalid("budget.k must be <= 10 for the standard family (ten signal features)");
    }
    if (cfg.family == GeneratorFamily::AppendixB && cfg.k > 4) {
        throw invalid("budget.k must be <= 4 for the appendix_b family (four signal features)");
    }
    if (!(cfg.rbo_rho > 0.0 && cfg.rbo_rho < 1.0)) throw invalid("run.rbo_rho must lie in (0, 1)");
    for (Index b : cfg.total_budgets) {
        try {
            compute_schedule(cfg.n_features, cfg.k, cfg.m, b, cfg.allocation);
        } catch (const ArgumentError& e) {
            throw invalid(std::string("budget.total_b: ") + e.what());
        }
    }
    bool uses_logistic = cfg.ranker.kind == RankerKind::LogisticCoef;
    if (uses_logistic) {
        for (auto s : cfg.scenarios) {
            if (!is_classification(s)) throw invalid("the logistic ranker needs classification scenarios");
        }
    }
    RankerSpec probe = cfg.ranker;
    if (probe.kind == RankerKind::Oracle || probe.kind == RankerKind::NoisyOracle) probe.oracle_ranks = {0};
    try {
        validate(probe);
    } catch (const ArgumentError& e) {
        throw invalid(std::string("ranker: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

}  // namespace rampart
