#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "hashprompt/corpus.hpp"
#include "hashprompt/error.hpp"
#include "hashprompt/miner.hpp"
#include "support.hpp"

namespace hp = hashprompt;
using hp::miner::Itemset;

namespace {

std::vector<Itemset> image(const std::vector<Itemset>& sets, const hp::corpus::ValueBijection& b) {
    std::map<std::string, std::string> m(b.pairs.begin(), b.pairs.end());
    std::vector<Itemset> out;
    for (const auto& s : sets) {
        Itemset t{{}, s.support};
        for (const auto& item : s.items) t.items.push_back(m.at(item));
        std::sort(t.items.begin(), t.items.end());
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Apriori, CorrectDatasetCounts) {
    const auto& t = hp::corpus::builtin_datasets().csv_correct;
    const std::size_t expected[] = {6, 14, 16, 9, 2};
    std::size_t total = 0;
    for (std::size_t k = 1; k <= 5; ++k) {
        auto sets = hp::miner::apriori(t, {2, k});
        EXPECT_EQ(sets.size(), expected[k - 1]) << "length " << k;
        total += sets.size();
    }
    EXPECT_EQ(total, 47u);
    EXPECT_EQ(total * 5, 235u);
}

TEST(Apriori, LengthOneItems) {
    auto sets = hp::miner::apriori(hp::corpus::builtin_datasets().csv_correct, {2, 1});
    std::vector<std::string> items;
    for (const auto& s : sets) items.push_back(s.items.at(0));
    EXPECT_EQ(items, (std::vector<std::string>{"4", "false", "hot", "indeed", "omnivore", "yes"}));
}

TEST(Apriori, DerivedDatasetsHaveTheSameCounts) {
    const auto& d = hp::corpus::builtin_datasets();
    for (std::size_t k = 1; k <= 5; ++k) {
        auto base = hp::miner::apriori(d.csv_correct, {2, k});
        EXPECT_EQ(hp::miner::brute_force(d.csv_wrong, {2, k}).size(), base.size());
        EXPECT_EQ(hp::miner::apriori(d.csv_wrong, {2, k}), image(base, hp::corpus::wrong_mapping()));
        EXPECT_EQ(hp::miner::apriori(d.csv_hashed, {2, k}), image(base, hp::corpus::hash_mapping()));
    }
}

TEST(BruteForce, HashedLengthFive) {
    auto sets = hp::miner::brute_force(hp::corpus::builtin_datasets().csv_hashed, {2, 5});
    std::vector<Itemset> expected{
        {{"269963", "999999", "A6463C", "ADC8A2", "D11884"}, 2},
        {{"269963", "999999", "ADC8A2", "B0FAAD", "D11884"}, 2},
    };
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(sets, expected);
}

TEST(Apriori, SupportOneGivesEveryValue) {
    auto t = hp::corpus::parse_table("n,a,b\nr1,x,y\nr2,x,z\n");
    auto sets = hp::miner::apriori(t, {1, 1});
    EXPECT_EQ(sets.size(), 5u);
}

TEST(Apriori, EmptyTableAndOversizedLength) {
    auto empty = hp::corpus::parse_table("a,b\n");
    EXPECT_TRUE(hp::miner::apriori(empty, {2, 1}).empty());
    EXPECT_TRUE(hp::miner::brute_force(empty, {2, 1}).empty());
    EXPECT_TRUE(hp::miner::apriori(hp::corpus::builtin_datasets().csv_correct, {2, 8}).empty());
}

TEST(Apriori, RejectsSharedValues) {
    auto t = hp::corpus::parse_table("a,b\n1,1\n");
    EXPECT_THROW(hp::miner::apriori(t, {1, 1}), hp::NotCrossColumnUnique);
}

TEST(BruteForce, GuardsLargeTables) {
    hp::corpus::TransactionTable t;
    t.header = {"a"};
    for (int i = 0; i < 25; ++i) t.rows.push_back({"v" + std::to_string(i)});
    EXPECT_THROW(hp::miner::brute_force(t, {1, 1}), hp::OracleTooLarge);
}

TEST(Apriori, SupportsAreExact) {
    const auto& t = hp::corpus::builtin_datasets().csv_correct;
    for (std::size_t k = 1; k <= 5; ++k)
        for (const auto& s : hp::miner::apriori(t, {2, k})) EXPECT_EQ(s.support, hp::miner::support_of(t, s.items));
}

TEST(MinerProperty, AprioriEqualsBruteForce) {
    testsupport::Gen g(2024);
    for (int i = 0; i < 200; ++i) {
        auto t = g.table(6, 8);
        for (std::size_t s = 1; s <= t.rows.size() + 1; ++s)
            for (std::size_t k = 1; k <= t.columns() + 1; ++k)
                ASSERT_EQ(hp::miner::apriori(t, {s, k}), hp::miner::brute_force(t, {s, k}))
                    << hp::corpus::format_table(t) << "support " << s << " length " << k;
    }
}

TEST(MinerProperty, DownwardClosureAndMonotonicity) {
    testsupport::Gen g(99);
    for (int i = 0; i < 100; ++i) {
        auto t = g.table(5, 8);
        for (std::size_t s = 1; s <= 4; ++s)
            for (std::size_t k = 2; k <= t.columns(); ++k) {
                auto lower = hp::miner::apriori(t, {s, k - 1});
                for (const auto& set : hp::miner::apriori(t, {s, k}))
                    for (std::size_t drop = 0; drop < set.items.size(); ++drop) {
                        auto sub = set.items;
                        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
                        EXPECT_TRUE(std::any_of(lower.begin(), lower.end(),
                                                [&](const Itemset& x) { return x.items == sub; }));
                    }
                EXPECT_LE(hp::miner::apriori(t, {s + 1, k}).size(), hp::miner::apriori(t, {s, k}).size());
            }
    }
}

TEST(MinerProperty, BijectionEquivariance) {
    testsupport::Gen g(7);
    for (int i = 0; i < 100; ++i) {
        auto t = g.table(6, 8);
        auto b = g.bijection(t);
        auto mapped = hp::corpus::apply_bijection(t, b);
        for (std::size_t s = 1; s <= 3; ++s)
            for (std::size_t k = 1; k <= t.columns(); ++k)
                ASSERT_EQ(hp::miner::apriori(mapped, {s, k}), image(hp::miner::apriori(t, {s, k}), b));
    }
}

TEST(FormatItemset, QuotedList) {
    EXPECT_EQ(hp::miner::format_itemset({"hot", "yes"}), "{\"hot\", \"yes\"}");
}
