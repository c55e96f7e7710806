#include <cmath>
#include <numeric>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "rampart/parallel.hpp"
#include "rampart/rng.hpp"
#include "rampart/sampling.hpp"

using namespace rampart;

namespace {

std::vector<std::uint64_t> draws(Rng rng, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(rng());
    return out;
}

IndexList iota_pool(Index size) {
    IndexList p(static_cast<std::size_t>(size));
    std::iota(p.begin(), p.end(), Index{0});
    return p;
}

}  // namespace

TEST(DeriveRng, SameSeedAndTagGiveSameStream) {
    EXPECT_EQ(draws(derive_rng(7, 0), 100), draws(derive_rng(7, 0), 100));
}

TEST(DeriveRng, DifferentTagsDiffer) {
    const auto a = draws(derive_rng(7, 0), 100);
    const auto b = draws(derive_rng(7, 1), 100);
    int equal = 0;
    for (int i = 0; i < 100; ++i) equal += a[i] == b[i];
    EXPECT_EQ(equal, 0);
}

TEST(DeriveRng, StreamIndependentOfWorkerCount) {
    const auto reference = draws(derive_rng(7, 3), 100);
    std::vector<std::vector<std::uint64_t>> seen(8);
    parallel_for(8, 8, [&](std::size_t w) { seen[w] = draws(derive_rng(7, 3), 100); });
    for (const auto& s : seen) EXPECT_EQ(s, reference);
}

TEST(Rng, UniformBelowStaysInRange) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) ASSERT_LT(rng.uniform_below(7), 7u);
}

TEST(SampleMinipatch, ClampsFeatureCountToPool) {
    Rng rng = derive_rng(1, 0);
    const IndexList pool = iota_pool(5);
    const auto patch = sample_minipatch(pool, 50, 10, 10, rng, 0);
    EXPECT_EQ(patch.feats, pool);
    EXPECT_EQ(patch.obs.size(), 10u);
}

TEST(SampleMinipatch, PaperSizesAreDuplicateFree) {
    Rng rng = derive_rng(2, 0);
    const IndexList pool = iota_pool(500);
    const auto patch = sample_minipatch(pool, 1000, 125, 10, rng, 4);
    EXPECT_EQ(patch.obs.size(), 125u);
    EXPECT_EQ(patch.feats.size(), 10u);
    EXPECT_EQ(std::set<Index>(patch.obs.begin(), patch.obs.end()).size(), 125u);
    EXPECT_EQ(std::set<Index>(patch.feats.begin(), patch.feats.end()).size(), 10u);
    EXPECT_TRUE(std::is_sorted(patch.obs.begin(), patch.obs.end()));
    EXPECT_TRUE(std::is_sorted(patch.feats.begin(), patch.feats.end()));
    EXPECT_GE(patch.obs.front(), 0);
    EXPECT_LT(patch.obs.back(), 1000);
    EXPECT_EQ(patch.patch_id, 4u);
}

TEST(SampleMinipatch, FeatsComeFromAnArbitraryPool) {
    const IndexList pool{3, 17, 42, 99, 5};
    Rng rng = derive_rng(3, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const auto patch = sample_minipatch(pool, 10, 3, 2, rng, 0);
        for (Index f : patch.feats) ASSERT_NE(std::find(pool.begin(), pool.end(), f), pool.end());
    }
}

TEST(SampleMinipatch, RejectsBadArguments) {
    Rng rng(0);
    const IndexList pool = iota_pool(4);
    EXPECT_THROW(sample_minipatch(pool, 10, 11, 2, rng, 0), ArgumentError);
    EXPECT_THROW(sample_minipatch({}, 10, 5, 2, rng, 0), ArgumentError);
    EXPECT_THROW(sample_minipatch(pool, 10, 5, 0, rng, 0), ArgumentError);
}

// 50,000 patches, pool of 100, m = 10: inclusion frequency 0.10; binomial SD per
// feature is sqrt(0.1 * 0.9 / 50000) ~ 0.0013, so +-0.01 is > 7 SD.
TEST(SampleMinipatch, MarginalInclusionFrequency) {
    const IndexList pool = iota_pool(100);
    std::vector<int> hits(100, 0);
    const int patches = 50000;
    for (int b = 0; b < patches; ++b) {
        Rng rng = derive_rng(99, static_cast<std::uint64_t>(b));
        for (Index f : sample_minipatch(pool, 20, 5, 10, rng, b).feats) ++hits[f];
    }
    for (int h : hits) EXPECT_NEAR(h / static_cast<double>(patches), 0.10, 0.01);
}

// Chi-square goodness of fit of feature inclusion counts over 10^4 patches.
// Critical value of chi^2 with 29 dof at alpha = 0.001 is 58.30.
TEST(SampleMinipatch, InclusionPassesChiSquare) {
    const Index pool_size = 30;
    const Index m = 7;
    const int patches = 10000;
    const IndexList pool = iota_pool(pool_size);
    std::vector<double> hits(pool_size, 0.0);
    for (int b = 0; b < patches; ++b) {
        Rng rng = derive_rng(5, static_cast<std::uint64_t>(b));
        for (Index f : sample_minipatch(pool, 10, 3, m, rng, b).feats) hits[f] += 1.0;
    }
    const double expected = patches * static_cast<double>(m) / pool_size;
    double chi2 = 0.0;
    for (double h : hits) chi2 += (h - expected) * (h - expected) / expected;
    EXPECT_LT(chi2, 58.30);
}

// P(i and j both included) = m(m-1) / (P(P-1)); checked within 3 sigma.
TEST(SampleMinipatch, PairInclusionProbability) {
    const Index pool_size = 20;
    const Index m = 5;
    const int patches = 40000;
    const IndexList pool = iota_pool(pool_size);
    int both = 0;
    for (int b = 0; b < patches; ++b) {
        Rng rng = derive_rng(8, static_cast<std::uint64_t>(b));
        const auto feats = sample_minipatch(pool, 10, 3, m, rng, b).feats;
        const bool has2 = std::binary_search(feats.begin(), feats.end(), 2);
        const bool has11 = std::binary_search(feats.begin(), feats.end(), 11);
        both += has2 && has11;
    }
    const double p = static_cast<double>(m * (m - 1)) / static_cast<double>(pool_size * (pool_size - 1));
    const double sigma = std::sqrt(p * (1 - p) / patches);
    EXPECT_NEAR(both / static_cast<double>(patches), p, 3 * sigma);
}

TEST(SampleMinipatch, ObservationSubsetsAreUniform) {
    const IndexList pool = iota_pool(3);
    std::vector<int> hits(40, 0);
    const int patches = 20000;
    for (int b = 0; b < patches; ++b) {
        Rng rng = derive_rng(12, static_cast<std::uint64_t>(b));
        for (Index o : sample_minipatch(pool, 40, 10, 1, rng, b).obs) ++hits[o];
    }
    // Each row is included with probability 1/4; SD ~ 0.003.
    for (int h : hits) EXPECT_NEAR(h / static_cast<double>(patches), 0.25, 0.015);
}
