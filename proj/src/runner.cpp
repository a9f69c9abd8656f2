#include "hashprompt/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <filesystem>
#include <fstream>
#include <thread>

#include "hashprompt/corpus.hpp"
#include "hashprompt/error.hpp"
#include "hashprompt/miner.hpp"

namespace hashprompt::runner {

using nlohmann::json;

namespace {

constexpr int kMaxReferenceDepth = 8;

const corpus::TransactionTable& table_for(prompts::Dataset dataset) {
    const auto& data = corpus::builtin_datasets();
    switch (dataset) {
        case prompts::Dataset::Correct: return data.csv_correct;
        case prompts::Dataset::Wrong: return data.csv_wrong;
        case prompts::Dataset::Hashed: return data.csv_hashed;
    }
    return data.csv_correct;
}

gateway::ProviderConfig provider_for(const ExperimentPlan& plan, const std::string& model) {
    auto it = plan.providers.find(model);
    if (it != plan.providers.end()) return it->second;
    gateway::ProviderConfig p;
    p.name = model;
    p.model = model;
    return p;
}

template <typename F>
void for_each_line(const std::string& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            f(json::parse(line));
        } catch (const json::exception& ex) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
}

RunResult run_plan_at(const ExperimentPlan& plan, const RunOptions& options, int depth);

std::map<std::string, judge::Aggregate> load_references(const ExperimentPlan& plan, int depth) {
    std::map<std::string, judge::Aggregate> out;
    for (const auto& ref : plan.references) {
        judge::Aggregate agg;
        if (!ref.plan.empty()) {
            if (depth >= kMaxReferenceDepth) throw ConfigError("plan references nest too deeply at " + ref.plan);
            auto sub = load_plan(ref.plan);
            RunOptions replay;
            agg = run_plan_at(sub, replay, depth + 1).aggregate;
        } else {
            agg = judge::aggregate(read_scored(ref.scored));
        }
        if (agg.experiment.empty()) continue;
        out.insert_or_assign(agg.experiment, std::move(agg));
    }
    return out;
}

RunResult run_plan_at(const ExperimentPlan& plan, const RunOptions& options, int depth) {
    plan.validate();
    RunResult result;
    result.plan = plan;

    gateway::Mode mode = gateway::Mode::Replay;
    if (options.live)
        mode = plan.mode == gateway::Mode::Replay ? gateway::Mode::Record : plan.mode;
    else if (plan.mode != gateway::Mode::Replay)
        throw ConfigError("plan " + plan.id + " is configured for " + std::string(gateway::to_string(plan.mode)) +
                          " mode; pass --live to allow network calls");
    result.mode = mode;

    const auto planned = expand(plan);
    std::vector<gateway::TrialRecord> records(planned.size());

    if (!planned.empty()) {
        const std::string cassette_path = options.cassette.value_or(plan.cassette);
        std::shared_ptr<gateway::Cassette> cassette;
        if (mode == gateway::Mode::Replay) {
            if (cassette_path.empty() || !std::filesystem::exists(cassette_path))
                throw ConfigError("plan " + plan.id + ": replay cassette '" + cassette_path + "' does not exist");
            cassette = std::make_shared<gateway::Cassette>(cassette_path);
        } else if (mode == gateway::Mode::Record) {
            if (cassette_path.empty()) throw ConfigError("plan " + plan.id + ": record mode needs a cassette path");
            cassette = std::make_shared<gateway::Cassette>(cassette_path);
        }

        std::shared_ptr<gateway::ChatBackend> backend;
        if (mode != gateway::Mode::Replay) {
            backend = options.backend ? options.backend : std::make_shared<gateway::HttpChatBackend>();
            for (const auto& t : plan.trials)
                if (!options.backend && provider_for(plan, t.model).endpoint.empty())
                    throw ConfigError("plan " + plan.id + ": provider " + t.model + " has no endpoint");
        }

        gateway::Gateway gw(mode, backend, cassette, options.retry);
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        auto worker = [&] {
            for (;;) {
                if (stop.load()) return;
                std::size_t i = next.fetch_add(1);
                if (i >= planned.size()) return;
                const auto& p = planned[i];
                try {
                    const auto provider = provider_for(plan, p.model);
                    gateway::TrialKey key{plan.id, format_variant(p.variant), p.model, p.iteration,
                                          gateway::prompt_digest(p.prompt.text)};
                    auto completion = gw.call(key, provider, p.prompt.text);
                    records[i] = {plan.id,        key.variant,          p.iteration,      p.prompt.text,
                                  completion.text, p.model, completion.timestamp, completion.status};
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    stop.store(true);
                    return;
                }
            }
        };

        std::size_t workers = std::min(options.workers.value_or(plan.workers), planned.size());
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    result.trials.reserve(records.size());
    for (const auto& r : records) {
        result.trials.push_back(score_record(r));
        if (r.status == gateway::Status::TransportError) ++result.transport_errors;
    }
    result.aggregate = judge::aggregate(result.trials);
    result.aggregate.experiment = plan.id;
    result.references = load_references(plan, depth);
    result.pairings = evaluate_pairings(plan.pairings, result.aggregate, result.references);
    return result;
}

}  // namespace

const std::vector<miner::Itemset>& oracle_for(prompts::Dataset dataset, std::size_t length) {
    static const auto cache = [] {
        std::map<std::pair<int, std::size_t>, std::vector<miner::Itemset>> out;
        for (auto d : {prompts::Dataset::Correct, prompts::Dataset::Wrong, prompts::Dataset::Hashed})
            for (std::size_t len = 1; len <= 5; ++len)
                out[{static_cast<int>(d), len}] = miner::apriori(table_for(d), {2, len});
        return out;
    }();
    auto it = cache.find({static_cast<int>(dataset), length});
    if (it == cache.end()) throw InvalidLength(static_cast<int>(length));
    return it->second;
}

judge::ScoredTrial score_record(const gateway::TrialRecord& record) {
    judge::ScoredTrial out;
    out.record = record;
    const Variant v = parse_variant(record.variant);
    out.condition = prompts::template_path(v.ref);
    if (v.ref.experiment == prompts::Experiment::Itemset) out.length = static_cast<std::size_t>(v.length);
    if (record.status == gateway::Status::TransportError) return out;

    const auto rendered = prompts::render(v.ref, v.preamble, v.length == 0 ? 1 : v.length);
    const bool refused = record.status == gateway::Status::Refusal;
    if (const auto* key = std::get_if<prompts::LindaKey>(&rendered.answer_key)) {
        out.verdict = refused ? judge::LindaVerdict{judge::Choice::Neither, "refusal", false}
                              : judge::classify_linda(record.response, key->options);
    } else {
        const auto& task = std::get<miner::MiningTask>(rendered.answer_key);
        auto parsed = refused ? std::vector<judge::ItemSet>{} : judge::parse_itemsets(record.response);
        out.score = judge::score_run(parsed, oracle_for(v.ref.dataset, task.length), task);
    }
    return out;
}

stats::TestBattery compare(const judge::ConditionTally& a, const judge::ConditionTally& b, bool itemset) {
    stats::ContingencyTable2x2 t;
    if (itemset)
        t = {a.itemset.found, a.itemset.not_found, b.itemset.found, b.itemset.not_found};
    else
        t = {a.linda.correct(), a.linda.wrong(), b.linda.correct(), b.linda.wrong()};
    return stats::run_battery(t);
}

std::vector<PairingResult> evaluate_pairings(const std::vector<Pairing>& pairings, const judge::Aggregate& own,
                                             const std::map<std::string, judge::Aggregate>& references) {
    std::vector<PairingResult> out;
    for (const auto& p : pairings) {
        PairingResult r;
        r.pairing = p;
        auto side = [&](const Selector& s, judge::ConditionTally& tally) -> std::string {
            const judge::Aggregate* agg = &own;
            if (!s.experiment.empty() && s.experiment != own.experiment) {
                auto it = references.find(s.experiment);
                if (it == references.end()) return "no referenced experiment '" + s.experiment + "'";
                agg = &it->second;
            }
            tally = agg->pooled(s.template_path, s.model.empty() ? std::vector<std::string>{}
                                                                 : std::vector<std::string>{s.model});
            if (tally.trials == 0) return "'" + s.to_string() + "' selects no trials";
            return {};
        };
        judge::ConditionTally a, b;
        r.error = side(p.a, a);
        if (r.error.empty()) r.error = side(p.b, b);
        const bool a_itemset = prompts::parse_template_path(p.a.template_path).experiment == prompts::Experiment::Itemset;
        const bool b_itemset = prompts::parse_template_path(p.b.template_path).experiment == prompts::Experiment::Itemset;
        if (r.error.empty() && a_itemset != b_itemset) r.error = "pairs an itemset condition with a Linda condition";
        if (r.error.empty()) r.battery = compare(a, b, a_itemset);
        out.push_back(std::move(r));
    }
    return out;
}

RunResult run_plan(const ExperimentPlan& plan, const RunOptions& options) { return run_plan_at(plan, options, 0); }

std::vector<judge::ScoredTrial> read_scored(const std::string& path) {
    std::vector<judge::ScoredTrial> out;
    for_each_line(path, [&](const json& j) { out.push_back(judge::scored_from_json(j)); });
    return out;
}

void write_scored(const std::string& path, const std::vector<judge::ScoredTrial>& trials) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& t : trials) out << judge::to_json(t).dump() << '\n';
}

std::vector<gateway::TrialRecord> read_records(const std::string& path) {
    std::vector<gateway::TrialRecord> out;
    for_each_line(path, [&](const json& j) { out.push_back(gateway::trial_from_json(j)); });
    return out;
}

}  // namespace hashprompt::runner
