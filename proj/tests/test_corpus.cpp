#include <gtest/gtest.h>

#include "hashprompt/corpus.hpp"
#include "hashprompt/error.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

namespace hp = hashprompt;
using hp::corpus::TransactionTable;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::vector<std::string>& row_named(const TransactionTable& t, const std::string& name) {
    for (const auto& r : t.rows)
        if (r.front() == name) return r;
    throw std::runtime_error("no row " + name);
}

}  // namespace

TEST(ParseTable, FigureTableHasSevenColumnsFourRows) {
    const auto& t = hp::corpus::builtin_datasets().csv_correct;
    EXPECT_EQ(t.columns(), 7u);
    EXPECT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.header[0], "name");
    EXPECT_EQ(t.header[1], "legs count");
}

TEST(ParseTable, MinimalTable) {
    auto t = hp::corpus::parse_table("a\n1");
    EXPECT_EQ(t.columns(), 1u);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0][0], "1");
}

TEST(ParseTable, RaggedRowReportsIndex) {
    try {
        hp::corpus::parse_table("a,b\n1");
        FAIL() << "expected RaggedTable";
    } catch (const hp::RaggedTable& e) {
        EXPECT_EQ(e.row(), 1u);
    }
}

TEST(ParseTable, EmptyInput) {
    EXPECT_THROW(hp::corpus::parse_table(""), hp::EmptyTable);
    EXPECT_THROW(hp::corpus::parse_table("\n\n"), hp::EmptyTable);
}

TEST(ParseTable, TrimsCellsAndAcceptsCrlf) {
    auto t = hp::corpus::parse_table("a , b\r\n 1 ,2 \r\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.rows[0], (std::vector<std::string>{"1", "2"}));
}

TEST(ParseTable, FormatRoundTrip) {
    for (const auto* t : {&hp::corpus::builtin_datasets().csv_correct, &hp::corpus::builtin_datasets().csv_wrong,
                          &hp::corpus::builtin_datasets().csv_hashed})
        EXPECT_EQ(hp::corpus::parse_table(hp::corpus::format_table(*t)), *t);
}

TEST(Builtin, CorrectFoxRow) {
    EXPECT_EQ(row_named(hp::corpus::builtin_datasets().csv_correct, "fox"),
              (std::vector<std::string>{"fox", "4", "omnivore", "hot", "yes", "false", "indeed"}));
}

TEST(Builtin, WrongRabbitRow) {
    EXPECT_EQ(row_named(hp::corpus::builtin_datasets().csv_wrong, "rabbit"),
              (std::vector<std::string>{"rabbit", "6", "carnivore", "cold", "no", "true", "negative"}));
}

TEST(Builtin, HashedHeader) {
    EXPECT_EQ(hp::corpus::builtin_datasets().csv_hashed.header,
              (std::vector<std::string>{"354C31", "DBCEEF", "6CE255", "199D26", "D59553", "331981", "869F50"}));
}

TEST(Builtin, AllCrossColumnUnique) {
    const auto& d = hp::corpus::builtin_datasets();
    EXPECT_NO_THROW(hp::corpus::require_cross_column_unique(d.csv_correct));
    EXPECT_NO_THROW(hp::corpus::require_cross_column_unique(d.csv_wrong));
    EXPECT_NO_THROW(hp::corpus::require_cross_column_unique(d.csv_hashed));
}

TEST(ApplyBijection, WrongMappingGivesWrongTable) {
    const auto& d = hp::corpus::builtin_datasets();
    EXPECT_EQ(hp::corpus::apply_bijection(d.csv_correct, hp::corpus::wrong_mapping()), d.csv_wrong);
}

TEST(ApplyBijection, HashMappingGivesHashedTable) {
    const auto& d = hp::corpus::builtin_datasets();
    EXPECT_EQ(hp::corpus::apply_bijection(d.csv_correct, hp::corpus::hash_mapping()), d.csv_hashed);
}

TEST(ApplyBijection, Identity) {
    const auto& t = hp::corpus::builtin_datasets().csv_correct;
    hp::corpus::ValueBijection id;
    for (const auto& row : t.rows)
        for (const auto& v : row) id.pairs.emplace_back(v, v);
    // Duplicates are harmless when they agree.
    std::sort(id.pairs.begin(), id.pairs.end());
    id.pairs.erase(std::unique(id.pairs.begin(), id.pairs.end()), id.pairs.end());
    EXPECT_EQ(hp::corpus::apply_bijection(t, id), t);
}

TEST(ApplyBijection, MissingValue) {
    auto t = hp::corpus::parse_table("a,b\n1,2\n");
    hp::corpus::ValueBijection b{{{"1", "x"}}, hp::corpus::BijectionScope::CellsOnly};
    try {
        hp::corpus::apply_bijection(t, b);
        FAIL() << "expected IncompleteBijection";
    } catch (const hp::IncompleteBijection& e) {
        EXPECT_EQ(e.value(), "2");
    }
}

TEST(ApplyBijection, NonInjective) {
    auto t = hp::corpus::parse_table("a,b\n1,2\n");
    hp::corpus::ValueBijection b{{{"1", "x"}, {"2", "x"}}, hp::corpus::BijectionScope::CellsOnly};
    EXPECT_THROW(hp::corpus::apply_bijection(t, b), hp::NotInjective);
}

TEST(ApplyBijection, RejectsSharedValuesAcrossColumns) {
    auto t = hp::corpus::parse_table("a,b\n1,1\n");
    EXPECT_THROW(hp::corpus::require_cross_column_unique(t), hp::NotCrossColumnUnique);
    hp::corpus::ValueBijection b{{{"1", "x"}}, hp::corpus::BijectionScope::CellsOnly};
    EXPECT_THROW(hp::corpus::apply_bijection(t, b), hp::NotCrossColumnUnique);
}

TEST(ApplyBijection, RoundTripOnRandomTables) {
    testsupport::Gen g(11);
    for (int i = 0; i < 200; ++i) {
        auto t = g.table();
        auto b = g.bijection(t);
        auto there = hp::corpus::apply_bijection(t, b);
        EXPECT_EQ(hp::corpus::apply_bijection(there, b.inverse()), t);
    }
}

TEST(BijectionFiles, BundledFilesMatchBuiltinMappings) {
    auto wrong = hp::corpus::parse_bijection(slurp(testsupport::source_path("data/bijections/wrong.txt")),
                                             hp::corpus::BijectionScope::CellsOnly);
    auto hashed = hp::corpus::parse_bijection(slurp(testsupport::source_path("data/bijections/hashed.txt")),
                                              hp::corpus::BijectionScope::CellsAndHeader);
    EXPECT_EQ(wrong.pairs, hp::corpus::wrong_mapping().pairs);
    EXPECT_EQ(hashed.pairs, hp::corpus::hash_mapping().pairs);
}

TEST(BijectionFiles, CommentsAndMissingArrow) {
    auto b = hp::corpus::parse_bijection("# comment\n a => b \n\n", hp::corpus::BijectionScope::CellsOnly);
    ASSERT_EQ(b.pairs.size(), 1u);
    EXPECT_EQ(b.pairs[0], (std::pair<std::string, std::string>{"a", "b"}));
    EXPECT_THROW(hp::corpus::parse_bijection("a -> b\n", hp::corpus::BijectionScope::CellsOnly), hp::ConfigError);
}
