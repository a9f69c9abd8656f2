#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hashprompt/corpus.hpp"

namespace hashprompt::miner {

/// Items are bare cell values; column names never take part.
/// `items` is kept sorted and duplicate-free.
struct Itemset {
    std::vector<std::string> items;
    std::size_t support = 0;

    auto operator<=>(const Itemset&) const = default;
};

struct MiningTask {
    std::size_t min_support = 2;
    std::size_t length = 1;

    bool operator==(const MiningTask&) const = default;
};

/// Level-wise Apriori with prefix joining. Returns the frequent itemsets of exactly
/// `task.length` items, sorted lexicographically. Lengths above the column count
/// yield an empty result. Throws NotCrossColumnUnique.
std::vector<Itemset> apriori(const corpus::TransactionTable& table, const MiningTask& task);

inline constexpr std::size_t kBruteForceValueLimit = 20;

/// Exhaustive subset enumeration with the same contract as apriori.
/// Throws OracleTooLarge above kBruteForceValueLimit distinct values.
std::vector<Itemset> brute_force(const corpus::TransactionTable& table, const MiningTask& task);

/// Number of rows whose value set contains every item.
std::size_t support_of(const corpus::TransactionTable& table, const std::vector<std::string>& items);

/// `{"a", "b"}` rendering used by the CLI and the synthetic responder.
std::string format_itemset(const std::vector<std::string>& items);

}  // namespace hashprompt::miner
