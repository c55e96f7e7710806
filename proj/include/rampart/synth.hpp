#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rampart/data.hpp"
#include "rampart/error.hpp"
#include "rampart/rng.hpp"

namespace rampart {

struct Covariance {
    enum class Kind { Identity, Ar1 } kind = Kind::Identity;
    double rho = 0.0;  // only for Ar1

    static Covariance identity() { return {}; }
    static Covariance ar1(double rho) { return {Kind::Ar1, rho}; }
};

inline std::string to_string(const Covariance& c) {
    if (c.kind == Covariance::Kind::Identity) return "identity";
    return "ar1(" + csv::format_double(c.rho) + ")";
}

enum class Scenario { LinearRegression, NonlinearRegression, LinearClassification, NonlinearClassification };

inline std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::LinearRegression: return "linear_regression";
        case Scenario::NonlinearRegression: return "nonlinear_regression";
        case Scenario::LinearClassification: return "linear_classification";
        case Scenario::NonlinearClassification: return "nonlinear_classification";
    }
    return "unknown";
}

inline Scenario parse_scenario(std::string_view name) {
    for (auto s : {Scenario::LinearRegression, Scenario::NonlinearRegression,
                   Scenario::LinearClassification, Scenario::NonlinearClassification}) {
        if (to_string(s) == name) return s;
    }
    throw ArgumentError("unknown scenario '" + std::string(name) + "'");
}

inline bool is_nonlinear(Scenario s) {
    return s == Scenario::NonlinearRegression || s == Scenario::NonlinearClassification;
}
inline bool is_classification(Scenario s) {
    return s == Scenario::LinearClassification || s == Scenario::NonlinearClassification;
}

struct GenConfig {
    Index n = 1000;
    Index m = 500;
    Covariance covariance;
    double gamma = 0.5;
    Scenario scenario = Scenario::LinearRegression;
    std::uint64_t seed = 0;
};

struct SynthDataset {
    Dataset dataset;
    TrueImportance truth;
    GenConfig config;
};

// Number of leading features carrying signal in the standard benchmark.
inline constexpr Index kSignalFeatures = 10;

/// Rows i.i.d. N(0, Sigma). AR(1) rows come from x_1 = z_1,
/// x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j, which reproduces Sigma_ij = rho^|i-j|
/// exactly; with rho = 0 this consumes the same draws as Identity.
inline Matrix gen_features(Index n, Index m, const Covariance& cov, Rng& rng) {
    if (n < 1 || m < 1) throw ArgumentError("gen_features needs N, M >= 1");
    const bool ar1 = cov.kind == Covariance::Kind::Ar1;
    if (ar1 && !(cov.rho >= 0.0 && cov.rho < 1.0)) throw ArgumentError("AR(1) rho must lie in [0, 1)");
    const double rho = ar1 ? cov.rho : 0.0;
    const double innovation = std::sqrt(1.0 - rho * rho);
    Matrix x(n, m);
    for (Index i = 0; i < n; ++i) {
        double prev = 0.0;
        for (Index j = 0; j < m; ++j) {
            const double z = rng.normal();
            prev = j == 0 ? z : rho * prev + innovation * z;
            x(i, j) = prev;
        }
    }
    return x;
}

/// beta_i = gamma * (11 - i) for the first ten (1-based) features, 0 beyond.
inline Vector make_beta(Index m, double gamma) {
    if (m < kSignalFeatures) {
        throw ArgumentError("the coefficient ladder needs M >= 10, got " + std::to_string(m));
    }
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be > 0");
    Vector beta = Vector::Zero(m);
    for (Index i = 0; i < kSignalFeatures; ++i) beta[i] = gamma * static_cast<double>(kSignalFeatures - i);
    return beta;
}

// Link for 0-based signal column j: cos^(j+2) for j < 5, sin^(j-3) for 5 <= j < 10.
inline double signal_link(Index j, double v) {
    if (j < 5) return std::pow(std::cos(v), static_cast<double>(j + 2));
    return std::pow(std::sin(v), static_cast<double>(j - 3));
}

// Centers and scales column j in place with its empirical mean and (1/N) variance.
inline void standardize_column(Matrix& x, Index j) {
    const auto n = static_cast<double>(x.rows());
    const double mean = x.col(j).mean();
    x.col(j).array() -= mean;
    const double sd = std::sqrt(x.col(j).squaredNorm() / n);
    if (!(sd > 0.0)) {
        throw DataError("column " + std::to_string(j) + " has zero empirical variance");
    }
    x.col(j) /= sd;
}

/// Columns that enter the response. Linear scenarios standardize every X_j;
/// nonlinear scenarios replace each of the ten signal columns by g_j(X_j) and
/// standardize it. Non-signal columns in nonlinear scenarios pass through.
inline Matrix apply_link(const Matrix& x, Scenario scenario) {
    if (x.cols() < kSignalFeatures) throw ArgumentError("apply_link needs M >= 10");
    Matrix out = x;
    if (!is_nonlinear(scenario)) {
        for (Index j = 0; j < out.cols(); ++j) standardize_column(out, j);
        return out;
    }
    for (Index j = 0; j < kSignalFeatures; ++j) {
        for (Index i = 0; i < out.rows(); ++i) out(i, j) = signal_link(j, x(i, j));
        standardize_column(out, j);
    }
    return out;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// f = x_linked * beta; regression adds N(0, 1) noise, classification draws
/// Bernoulli(sigmoid(f)).
inline Vector gen_response(const Matrix& x_linked, const Vector& beta, Scenario scenario, Rng& rng) {
    if (x_linked.cols() != beta.size()) throw ArgumentError("beta length does not match column count");
    const Vector f = x_linked * beta;
    Vector y(f.size());
    const bool classify = is_classification(scenario);
    for (Index i = 0; i < f.size(); ++i) {
        y[i] = classify ? (rng.bernoulli(sigmoid(f[i])) ? 1.0 : 0.0) : f[i] + rng.normal();
    }
    return y;
}

/// One benchmark dataset. Features use stream 0 of `seed` and the response stream 1.
/// The dataset exposes standardized X (the raw features, not g_j(X_j)); the truth is
/// |beta|.
inline SynthDataset generate(const GenConfig& cfg) {
    if (cfg.n < 1) throw ArgumentError("N must be >= 1");
    Rng feature_rng = derive_rng(cfg.seed, 0);
    Rng response_rng = derive_rng(cfg.seed, 1);
    Matrix x = gen_features(cfg.n, cfg.m, cfg.covariance, feature_rng);
    const Vector beta = make_beta(cfg.m, cfg.gamma);
    const Matrix linked = apply_link(x, cfg.scenario);

    SynthDataset out;
    out.config = cfg;
    out.dataset.y = gen_response(linked, beta, cfg.scenario, response_rng);
    for (Index j = 0; j < x.cols(); ++j) standardize_column(x, j);
    out.dataset.x = std::move(x);
    out.dataset.task = is_classification(cfg.scenario) ? Task::Classification : Task::Regression;
    std::vector<double> phi(beta.data(), beta.data() + beta.size());
    for (double& p : phi) p = std::abs(p);
    out.truth = make_true_importance(std::move(phi));
    return out;
}

inline constexpr Index kAppendixBRows = 1000;
inline constexpr Index kAppendixBFeatures = 160;
inline constexpr double kAppendixBScale = 0.22;

/// Theory-check dataset: X ~ N(0, I_160), N = 1000, y = 0.22 * X beta + eps with
/// beta = (4, 3, 2, 1, 0, ...). X is left unstandardized.
inline SynthDataset gen_appendix_b(std::uint64_t seed) {
    Rng feature_rng = derive_rng(seed, 0);
    Rng response_rng = derive_rng(seed, 1);
    SynthDataset out;
    out.config.n = kAppendixBRows;
    out.config.m = kAppendixBFeatures;
    out.config.gamma = kAppendixBScale;
    out.config.seed = seed;
    Matrix x = gen_features(kAppendixBRows, kAppendixBFeatures, Covariance::identity(), feature_rng);
    Vector beta = Vector::Zero(kAppendixBFeatures);
    beta.head(4) << 4.0, 3.0, 2.0, 1.0;
    const Vector f = kAppendixBScale * (x * beta);
    out.dataset.y.resize(kAppendixBRows);
    for (Index i = 0; i < kAppendixBRows; ++i) out.dataset.y[i] = f[i] + response_rng.normal();
    out.dataset.x = std::move(x);
    out.dataset.task = Task::Regression;
    std::vector<double> phi(static_cast<std::size_t>(kAppendixBFeatures), 0.0);
    for (Index j = 0; j < 4; ++j) phi[j] = kAppendixBScale * beta[j];
    out.truth = make_true_importance(std::move(phi));
    return out;
}

}  // namespace rampart
