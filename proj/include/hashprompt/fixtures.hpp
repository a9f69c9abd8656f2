#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hashprompt/gateway.hpp"
#include "hashprompt/judge.hpp"
#include "hashprompt/runner.hpp"

namespace hashprompt::fixtures {

/// Timestamp stamped on every synthesized cassette entry.
inline constexpr const char* kFixtureTimestamp = "2025-01-01T00:00:00Z";

/// An answer the judge classifies as `choice` for the given options.
std::string linda_answer(judge::Choice choice, const prompts::LindaKey& key);

/// One set literal per line.
std::string itemset_answer(const std::vector<judge::ItemSet>& sets);

/// Published per-condition itemset outcome. Categories follow judge::Category order.
struct ItemsetTarget {
    std::optional<std::array<std::size_t, 4>> categories;
    std::size_t found = 0;
    std::size_t not_found = 0;
    /// Without it, each lower-precision run carries exactly one hallucination.
    std::optional<std::size_t> hallucinations;
};

struct RunShape {
    std::size_t missing = 0;
    std::size_t hallucinated = 0;
};

/// Per-run counts that sum to the target and, when categories are given, put
/// exactly that many runs in each category. Throws Error when infeasible.
std::vector<RunShape> plan_itemset_runs(const std::vector<std::size_t>& oracle_sizes, const ItemsetTarget& target);

/// Distinct sets of `length` values drawn from the dataset that are not frequent.
std::vector<judge::ItemSet> hallucinated_sets(prompts::Dataset dataset, std::size_t length, std::size_t count);

using Responder = std::function<std::pair<gateway::Status, std::string>(const runner::PlannedTrial&)>;

/// Always names the single-property option and lists exactly the oracle itemsets.
Responder perfect_responder();

/// Reproduces the archived tallies of a bundled plan (exp1, exp2, exp3,
/// exp4-free-text, exp4-itemset, exp4-tabular). Throws ConfigError otherwise.
Responder published_responder(const runner::ExperimentPlan& plan);

/// One entry per planned trial, in plan order.
std::vector<gateway::CassetteEntry> synthesize_cassette(const runner::ExperimentPlan& plan, const Responder& responder);

/// JSON-lines text, one entry per line.
std::string serialize_cassette(const std::vector<gateway::CassetteEntry>& entries);

}  // namespace hashprompt::fixtures
