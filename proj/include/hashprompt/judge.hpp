#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hashprompt/gateway.hpp"
#include "hashprompt/miner.hpp"

namespace hashprompt::judge {

enum class Choice { NonConjunction, Conjunction, Neither };

std::string_view to_string(Choice c);
Choice parse_choice(std::string_view s);

struct LindaVerdict {
    Choice choice = Choice::Neither;
    /// The substring (or rule) that decided the verdict, kept for manual audit.
    std::string evidence;
    /// Set when the response named both options or hedged between them.
    bool ambiguous = false;

    bool operator==(const LindaVerdict&) const = default;
};

/// Classifies a Linda answer. The conjunction option is the one whose text strictly
/// contains the other's. Priority: explicit option letter, then the longest verbatim
/// option mention, then hedging/refusal phrases, then Neither.
LindaVerdict classify_linda(std::string_view response, const std::array<std::string, 2>& options);

using ItemSet = std::vector<std::string>;  ///< sorted, duplicate-free labels

/// Extracts every innermost brace group as a set of labels. Quoted (single or double)
/// and bare tokens are accepted; empty groups are skipped; repeated sets are dropped
/// keeping the first occurrence.
std::vector<ItemSet> parse_itemsets(std::string_view response);

enum class Category {
    PerfectPrecisionPerfectRecall,
    PerfectRecallLowerPrecision,
    PerfectPrecisionLowerRecall,
    LowerPrecisionLowerRecall,
};

std::string_view to_string(Category c);
std::string_view label(Category c);
Category parse_category(std::string_view s);
/// Category as a function of the two perfection flags.
Category categorize(bool perfect_precision, bool perfect_recall);

struct ScoreBreakdown {
    std::size_t tp = 0;
    std::size_t fp = 0;  ///< hallucinations, wrong-cardinality sets included
    std::size_t found = 0;
    std::size_t not_found = 0;
    double precision = 1.0;  ///< 1 when nothing was output
    double recall = 1.0;     ///< 1 when the oracle is empty
    Category category = Category::PerfectPrecisionPerfectRecall;
    bool empty_output = false;

    bool operator==(const ScoreBreakdown&) const = default;
};

/// Compares parsed sets with the oracle on labels only (supports ignored).
ScoreBreakdown score_run(const std::vector<ItemSet>& parsed, const std::vector<miner::Itemset>& oracle,
                         const miner::MiningTask& task);

/// A trial plus whatever the judge concluded about it.
struct ScoredTrial {
    gateway::TrialRecord record;
    std::string condition;  ///< template path the trial was rendered from
    std::optional<std::size_t> length;
    std::optional<LindaVerdict> verdict;
    std::optional<ScoreBreakdown> score;
};

nlohmann::json to_json(const ScoredTrial& t);
ScoredTrial scored_from_json(const nlohmann::json& j);

struct LindaTally {
    std::size_t non_conjunction = 0;
    std::size_t conjunction = 0;
    std::size_t neither = 0;

    std::size_t correct() const noexcept { return non_conjunction; }
    /// Conjunction answers and non-answers both count as wrong.
    std::size_t wrong() const noexcept { return conjunction + neither; }
    std::size_t total() const noexcept { return non_conjunction + conjunction + neither; }
    bool operator==(const LindaTally&) const = default;
};

struct ItemsetTally {
    std::size_t runs = 0;
    std::size_t found = 0;
    std::size_t not_found = 0;
    std::size_t hallucinations = 0;
    std::size_t empty_outputs = 0;
    std::array<std::size_t, 4> categories{};
    std::map<std::size_t, std::array<std::size_t, 3>> by_length;  ///< length -> {found, not_found, hallucinations}

    bool operator==(const ItemsetTally&) const = default;
};

struct ConditionTally {
    LindaTally linda;
    ItemsetTally itemset;
    std::size_t trials = 0;
    std::size_t transport_errors = 0;
    std::size_t refusals = 0;

    bool operator==(const ConditionTally&) const = default;
};

struct Aggregate {
    std::string experiment;
    /// (condition, model) -> tally
    std::map<std::pair<std::string, std::string>, ConditionTally> cells;
    /// Ambiguous Linda verdicts, for manual review.
    std::vector<gateway::TrialKey> audit;

    /// Sum over models. An empty model list means every model.
    ConditionTally pooled(const std::string& condition, const std::vector<std::string>& models = {}) const;
    std::vector<std::string> conditions() const;
    std::vector<std::string> models() const;

    bool operator==(const Aggregate&) const = default;
};

/// Folds scored trials into per-(condition, model) tallies. Order-independent.
/// Throws MixedAggregation when records come from more than one experiment.
Aggregate aggregate(const std::vector<ScoredTrial>& trials);

}  // namespace hashprompt::judge
