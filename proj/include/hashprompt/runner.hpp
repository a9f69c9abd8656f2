#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hashprompt/gateway.hpp"
#include "hashprompt/judge.hpp"
#include "hashprompt/prompts.hpp"
#include "hashprompt/stats.hpp"

namespace hashprompt::runner {

/// What a trial rendered: template, itemset length, preamble switch.
/// Text form: `<template>[@<length>][+no-preamble]`, e.g. "itemset/correct@3".
struct Variant {
    prompts::TemplateRef ref;
    int length = 0;  ///< itemset templates only, 1..5
    bool preamble = true;

    bool operator==(const Variant&) const = default;
};

std::string format_variant(const Variant& v);
/// Throws UnknownVariant or InvalidLength.
Variant parse_variant(std::string_view text);

struct TrialSpec {
    std::string template_path;
    std::string model;  ///< provider label
    std::size_t iterations = 1;
    std::vector<int> lengths;  ///< itemset templates; each length gets `iterations` runs
    bool preamble = true;
};

/// `[experiment:]template[@model]`. Without a model the condition is pooled over
/// every model of that experiment.
struct Selector {
    std::string experiment;  ///< empty means the plan's own experiment
    std::string template_path;
    std::string model;

    std::string to_string() const;
};

Selector parse_selector(std::string_view text);

struct Pairing {
    std::string name;
    Selector a;
    Selector b;
};

/// Another experiment whose tallies pairings may select. Exactly one field is set.
struct Reference {
    std::string plan;    ///< plan file, replayed against its own cassette
    std::string scored;  ///< scored-trial JSON-lines file
};

struct ExperimentPlan {
    std::string id;  ///< experiment label stored on every record
    std::string description;
    gateway::Mode mode = gateway::Mode::Replay;
    std::string cassette;
    std::map<std::string, gateway::ProviderConfig> providers;
    std::vector<TrialSpec> trials;
    std::vector<Pairing> pairings;
    std::vector<Reference> references;
    std::string output_dir;
    std::size_t workers = 4;

    /// Throws ConfigError.
    void validate() const;
};

/// Relative cassette, reference and provider-file paths resolve against `base_dir`.
/// Throws ConfigError.
ExperimentPlan parse_plan(std::string_view yaml_text, const std::string& base_dir = ".");
ExperimentPlan load_plan(const std::string& path);

/// One planned model call, in plan order.
struct PlannedTrial {
    Variant variant;
    std::string model;
    std::size_t iteration = 0;
    prompts::RenderedPrompt prompt;
};

/// Expands the plan's trial specs. Iterations count from 0 per (variant, model).
std::vector<PlannedTrial> expand(const ExperimentPlan& plan);

/// Frequent itemsets the judge compares against for an itemset template.
const std::vector<miner::Itemset>& oracle_for(prompts::Dataset dataset, std::size_t length);

/// Judges one record. Transport errors stay unscored; refusals count as non-answers.
judge::ScoredTrial score_record(const gateway::TrialRecord& record);

struct PairingResult {
    Pairing pairing;
    /// Linda: rows {correct, wrong}. Itemsets: rows {found, not found}.
    stats::TestBattery battery;
    std::string error;  ///< set when a side selects nothing
};

/// Reduces two tallies of the same kind to a 2x2 table and runs the battery.
stats::TestBattery compare(const judge::ConditionTally& a, const judge::ConditionTally& b, bool itemset);

struct RunOptions {
    std::optional<std::string> cassette;  ///< overrides the plan's cassette
    bool live = false;                    ///< required for live and record modes
    std::shared_ptr<gateway::ChatBackend> backend;  ///< defaults to HttpChatBackend
    gateway::RetryPolicy retry;
    std::optional<std::size_t> workers;
};

struct RunResult {
    ExperimentPlan plan;
    gateway::Mode mode = gateway::Mode::Replay;
    std::vector<judge::ScoredTrial> trials;  ///< plan order
    judge::Aggregate aggregate;
    std::map<std::string, judge::Aggregate> references;
    std::vector<PairingResult> pairings;
    std::size_t transport_errors = 0;

    bool any_errors() const noexcept { return transport_errors > 0; }
};

/// Renders, dispatches, judges and aggregates. Records keep plan order whatever
/// the worker count. Throws CassetteMiss in replay mode, ConfigError on bad setup.
RunResult run_plan(const ExperimentPlan& plan, const RunOptions& options = {});

/// Pairings evaluated against an aggregate plus referenced aggregates.
std::vector<PairingResult> evaluate_pairings(const std::vector<Pairing>& pairings, const judge::Aggregate& own,
                                             const std::map<std::string, judge::Aggregate>& references);

std::vector<judge::ScoredTrial> read_scored(const std::string& path);
void write_scored(const std::string& path, const std::vector<judge::ScoredTrial>& trials);
std::vector<gateway::TrialRecord> read_records(const std::string& path);

/// Markdown report. Byte-identical for identical inputs.
std::string render_markdown(const RunResult& result);
nlohmann::json render_json(const RunResult& result);

/// Writes <dir>/<id>.scored.jsonl, <dir>/<id>.report.md and <dir>/<id>.report.json.
void write_outputs(const RunResult& result, const std::string& dir);

}  // namespace hashprompt::runner
