#pragma once

// Hand-rolled generators shared by the property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hashprompt/corpus.hpp"

#ifndef HASHPROMPT_SOURCE_DIR
#define HASHPROMPT_SOURCE_DIR "."
#endif

namespace testsupport {

inline std::string source_path(const std::string& rel) { return std::string(HASHPROMPT_SOURCE_DIR) + "/" + rel; }

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t range(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[range(0, v.size() - 1)];
    }

    std::string word(std::size_t lo = 1, std::size_t hi = 6) {
        static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
        std::string out;
        for (std::size_t i = range(lo, hi); i > 0; --i) out += alphabet[range(0, alphabet.size() - 1)];
        return out;
    }

    /// Cross-column unique table: column c draws from values "c<c>v<k>".
    hashprompt::corpus::TransactionTable table(std::size_t max_cols = 6, std::size_t max_rows = 8,
                                               std::size_t max_values_per_col = 3) {
        hashprompt::corpus::TransactionTable t;
        const std::size_t cols = range(1, max_cols);
        const std::size_t rows = range(0, max_rows);
        std::vector<std::size_t> domain(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            t.header.push_back("col" + std::to_string(c));
            domain[c] = range(1, max_values_per_col);
        }
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::string> row;
            for (std::size_t c = 0; c < cols; ++c)
                row.push_back("c" + std::to_string(c) + "v" + std::to_string(range(0, domain[c] - 1)));
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    /// Random injective relabelling of every cell value of `t`.
    hashprompt::corpus::ValueBijection bijection(const hashprompt::corpus::TransactionTable& t) {
        std::set<std::string> values;
        for (const auto& row : t.rows) values.insert(row.begin(), row.end());
        std::vector<std::string> targets;
        std::set<std::string> used;
        while (targets.size() < values.size()) {
            auto w = word(2, 5);
            if (used.insert(w).second) targets.push_back(std::move(w));
        }
        hashprompt::corpus::ValueBijection b;
        std::size_t i = 0;
        for (const auto& v : values) b.pairs.emplace_back(v, targets[i++]);
        std::shuffle(b.pairs.begin(), b.pairs.end(), rng_);
        return b;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace testsupport
