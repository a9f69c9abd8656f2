#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hashprompt::corpus {

/// Header plus rectangular rows of trimmed string cells.
struct TransactionTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t columns() const noexcept { return header.size(); }
    bool operator==(const TransactionTable&) const = default;
};

enum class BijectionScope { CellsOnly, CellsAndHeader };

/// Value-level substitution applied per cell. Pairs keep their authoring order.
struct ValueBijection {
    std::vector<std::pair<std::string, std::string>> pairs;
    BijectionScope scope = BijectionScope::CellsOnly;

    /// Swaps every pair; scope is kept.
    ValueBijection inverse() const;
};

/// Parses comma-separated text (LF or CRLF). Blank lines are skipped; no quoting.
/// Throws EmptyTable or RaggedTable.
TransactionTable parse_table(std::string_view text);

/// Inverse of parse_table; LF line endings, trailing newline.
std::string format_table(const TransactionTable& table);

/// Throws NotCrossColumnUnique on the first value seen in two columns.
void require_cross_column_unique(const TransactionTable& table);

/// Replaces each in-scope cell by its image in one pass, so chains (4->6, 2->4) and
/// swaps (true<->false) are never applied twice.
/// Throws IncompleteBijection, NotInjective or NotCrossColumnUnique.
TransactionTable apply_bijection(const TransactionTable& table, const ValueBijection& bijection);

/// Parses one `source => target` pair per line; '#' starts a comment line.
ValueBijection parse_bijection(std::string_view text, BijectionScope scope);

/// CSV-correct and the two derived variants shown to the models.
struct BuiltinDatasets {
    TransactionTable csv_correct;
    TransactionTable csv_wrong;
    TransactionTable csv_hashed;
};

const BuiltinDatasets& builtin_datasets();

/// Published counterfactual mapping from CSV-correct to CSV-wrong (names fixed).
const ValueBijection& wrong_mapping();

/// Published hash mapping from CSV-correct to CSV-hashed, header included.
const ValueBijection& hash_mapping();

}  // namespace hashprompt::corpus
