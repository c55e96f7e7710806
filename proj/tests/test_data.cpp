#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "rampart/data.hpp"
#include "rampart/rng.hpp"

using namespace rampart;

namespace {

// Brute-force counting definition of the rank: how many |phi_i| strictly exceed |phi_j|.
std::vector<Index> pairwise_rank_oracle(const std::vector<double>& phi) {
    std::vector<Index> r(phi.size(), 0);
    for (std::size_t j = 0; j < phi.size(); ++j)
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (std::abs(phi[j]) < std::abs(phi[i])) ++r[j];
    return r;
}

Dataset small(Task task) {
    Dataset d;
    d.x.resize(2, 2);
    d.x << 1.0, 2.0, 3.0, 4.0;
    d.y.resize(2);
    d.y << 0.0, 1.0;
    d.task = task;
    return d;
}

}  // namespace

TEST(Validate, AcceptsMinimalClassificationData) {
    EXPECT_NO_THROW(validate(small(Task::Classification)));
}

TEST(Validate, RejectsLengthMismatch) {
    Dataset d = small(Task::Regression);
    d.y.resize(3);
    d.y << 1, 2, 3;
    EXPECT_THROW(validate(d), DataError);
}

TEST(Validate, ReportsNonFiniteCell) {
    Dataset d = small(Task::Regression);
    d.x(1, 0) = std::numeric_limits<double>::quiet_NaN();
    try {
        validate(d);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 1, col 0"), std::string::npos) << e.what();
    }
}

TEST(Validate, RejectsNonBinaryLabels) {
    Dataset d = small(Task::Classification);
    d.y[1] = 2.0;
    EXPECT_THROW(validate(d), DataError);
}

TEST(TrueRanks, DirectCount) {
    EXPECT_EQ(true_ranks({3, 1, 2}), (std::vector<Index>{0, 2, 1}));
}

TEST(TrueRanks, TiesShareTheLowerCount) {
    EXPECT_EQ(true_ranks({1, 1, 2}), (std::vector<Index>{1, 1, 0}));
}

TEST(TrueRanks, SignedAndTiedZerosMatchPairwiseOracle) {
    const std::vector<double> phi{-5, 4, 0, 0};
    const auto expected = pairwise_rank_oracle(phi);
    EXPECT_EQ(expected, (std::vector<Index>{0, 1, 2, 2}));
    EXPECT_EQ(true_ranks(phi), expected);
}

TEST(TrueRanks, RejectsNonFinite) {
    EXPECT_THROW(true_ranks({1.0, std::numeric_limits<double>::infinity()}), DataError);
}

TEST(TrueRanks, RandomVectorsMatchOracleAndAreTransformInvariant) {
    Rng rng(11);
    for (int rep = 0; rep < 300; ++rep) {
        const auto m = 1 + static_cast<std::size_t>(rng.uniform_below(30));
        std::vector<double> phi(m);
        // Small integer grid so ties are common.
        for (auto& p : phi) p = static_cast<double>(static_cast<int>(rng.uniform_below(9)) - 4);
        const auto ranks = true_ranks(phi);
        ASSERT_EQ(ranks, pairwise_rank_oracle(phi));
        std::vector<double> transformed(m);
        for (std::size_t j = 0; j < m; ++j) transformed[j] = std::exp(std::abs(phi[j])) * 3.0 + 1.0;
        ASSERT_EQ(true_ranks(transformed), ranks);
        ASSERT_GE(std::count(ranks.begin(), ranks.end(), 0), 1);
    }
}

TEST(Csv, ReadsHeaderAndLastColumnResponse) {
    std::istringstream in("a,b,target\n1,2,3\n4,5.5,-6e-1\n");
    const Dataset d = read_dataset_csv(in, {true, Task::Regression});
    ASSERT_EQ(d.rows(), 2);
    ASSERT_EQ(d.cols(), 2);
    EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_DOUBLE_EQ(d.x(1, 1), 5.5);
    EXPECT_DOUBLE_EQ(d.y[1], -0.6);
}

TEST(Csv, MalformedRowNamesTheLine) {
    std::istringstream in("1,2,3\n4,oops,6\n");
    try {
        read_dataset_csv(in, {false, Task::Regression});
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    std::istringstream ragged("1,2,3\n4,5\n");
    EXPECT_THROW(read_dataset_csv(ragged, {false, Task::Regression}), DataError);
}

TEST(Csv, ExportReadsBackExactly) {
    Rng rng(3);
    Dataset d;
    d.x.resize(5, 3);
    d.y.resize(5);
    for (Index i = 0; i < 5; ++i) {
        for (Index j = 0; j < 3; ++j) d.x(i, j) = rng.normal();
        d.y[i] = rng.normal();
    }
    std::istringstream in(to_csv(d));
    const Dataset back = read_dataset_csv(in, {true, Task::Regression});
    EXPECT_EQ(back.x, d.x);
    EXPECT_EQ(back.y, d.y);
    EXPECT_EQ(checksum(back), checksum(d));
}
