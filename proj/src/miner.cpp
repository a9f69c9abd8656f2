#include "hashprompt/miner.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>

#include "hashprompt/error.hpp"

namespace hashprompt::miner {

namespace {

using Items = std::vector<std::string>;

std::vector<Items> row_value_sets(const corpus::TransactionTable& table) {
    std::vector<Items> sets;
    sets.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        Items values(row.begin(), row.end());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        sets.push_back(std::move(values));
    }
    return sets;
}

std::size_t count_support(const std::vector<Items>& transactions, const Items& candidate) {
    return static_cast<std::size_t>(std::count_if(transactions.begin(), transactions.end(), [&](const Items& t) {
        return std::includes(t.begin(), t.end(), candidate.begin(), candidate.end());
    }));
}

// Joins itemsets that agree on all but their last item. `level` must be sorted.
std::vector<Items> join_candidates(const std::vector<Items>& level) {
    std::set<Items> frequent(level.begin(), level.end());
    std::vector<Items> candidates;
    for (std::size_t i = 0; i < level.size(); ++i) {
        for (std::size_t j = i + 1; j < level.size(); ++j) {
            const Items& a = level[i];
            const Items& b = level[j];
            if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) break;
            Items joined = a;
            joined.push_back(b.back());

            // Downward closure: every (k-1)-subset must already be frequent.
            bool closed = true;
            for (std::size_t drop = 0; drop + 2 < joined.size() && closed; ++drop) {
                Items subset;
                subset.reserve(joined.size() - 1);
                for (std::size_t k = 0; k < joined.size(); ++k)
                    if (k != drop) subset.push_back(joined[k]);
                closed = frequent.contains(subset);
            }
            if (closed) candidates.push_back(std::move(joined));
        }
    }
    return candidates;
}

}  // namespace

std::vector<Itemset> apriori(const corpus::TransactionTable& table, const MiningTask& task) {
    corpus::require_cross_column_unique(table);
    if (task.length == 0 || task.length > table.columns()) return {};

    const auto transactions = row_value_sets(table);

    std::map<std::string, std::size_t> singles;
    for (const auto& t : transactions)
        for (const auto& v : t) ++singles[v];

    std::vector<Itemset> level;
    for (const auto& [value, count] : singles)
        if (count >= task.min_support) level.push_back({{value}, count});

    for (std::size_t k = 2; k <= task.length && !level.empty(); ++k) {
        std::vector<Items> previous;
        previous.reserve(level.size());
        for (auto& s : level) previous.push_back(std::move(s.items));

        std::vector<Itemset> next;
        for (auto& candidate : join_candidates(previous)) {
            std::size_t support = count_support(transactions, candidate);
            if (support >= task.min_support) next.push_back({std::move(candidate), support});
        }
        level = std::move(next);
    }
    std::sort(level.begin(), level.end());
    return level;
}

std::vector<Itemset> brute_force(const corpus::TransactionTable& table, const MiningTask& task) {
    corpus::require_cross_column_unique(table);

    std::vector<std::string> values;
    for (const auto& row : table.rows) values.insert(values.end(), row.begin(), row.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.size() > kBruteForceValueLimit) throw OracleTooLarge(values.size(), kBruteForceValueLimit);
    if (task.length == 0 || task.length > table.columns()) return {};

    std::vector<std::uint32_t> row_masks;
    for (const auto& row : table.rows) {
        std::uint32_t mask = 0;
        for (const auto& cell : row) {
            auto idx = std::lower_bound(values.begin(), values.end(), cell) - values.begin();
            mask |= std::uint32_t{1} << idx;
        }
        row_masks.push_back(mask);
    }

    std::vector<Itemset> out;
    const std::uint32_t limit = std::uint32_t{1} << values.size();
    for (std::uint32_t subset = 1; subset < limit; ++subset) {
        if (static_cast<std::size_t>(std::popcount(subset)) != task.length) continue;
        std::size_t support = 0;
        for (auto m : row_masks)
            if ((m & subset) == subset) ++support;
        if (support < task.min_support) continue;
        Itemset s;
        s.support = support;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (subset & (std::uint32_t{1} << i)) s.items.push_back(values[i]);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t support_of(const corpus::TransactionTable& table, const std::vector<std::string>& items) {
    Items wanted(items);
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    return count_support(row_value_sets(table), wanted);
}

std::string format_itemset(const std::vector<std::string>& items) {
    std::string out = "{";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += '"';
        out += items[i];
        out += '"';
    }
    out += '}';
    return out;
}

}  // namespace hashprompt::miner
