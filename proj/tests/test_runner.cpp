#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "hashprompt/error.hpp"
#include "hashprompt/fixtures.hpp"
#include "hashprompt/runner.hpp"
#include "support.hpp"

namespace hp = hashprompt;
namespace fs = std::filesystem;
using namespace hp::runner;
using testsupport::source_path;

namespace {

ExperimentPlan bundled(const std::string& id) { return load_plan(source_path("configs/" + id + ".yaml")); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("hashprompt-runner-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Answers every Linda prompt with option A and every itemset prompt with nothing.
class CannedBackend : public hp::gateway::ChatBackend {
public:
    explicit CannedBackend(hp::gateway::Status status = hp::gateway::Status::Ok) : status_(status) {}
    hp::gateway::WireResult send(const hp::gateway::ProviderConfig&, std::string_view prompt) override {
        ++calls;
        if (status_ != hp::gateway::Status::Ok) return {status_, "", "canned failure"};
        return {status_, prompt.find("A) ") != std::string_view::npos ? "A)" : "X is b321.", ""};
    }
    std::atomic<int> calls{0};

private:
    hp::gateway::Status status_;
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HASHPROMPT_CLI) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const PairingResult& pairing(const RunResult& r, const std::string& name) {
    for (const auto& p : r.pairings)
        if (p.pairing.name == name) return p;
    throw std::runtime_error("no pairing " + name);
}

}  // namespace

TEST(Variant, RoundTrip) {
    for (const char* text : {"itemset/correct@3", "linda-free-text/original", "linda-tabular/hashed-with-rel+no-preamble",
                             "itemset/hashed@5"})
        EXPECT_EQ(format_variant(parse_variant(text)), text);
    EXPECT_THROW(parse_variant("itemset/correct@9"), hp::InvalidLength);
    EXPECT_THROW(parse_variant("nope/original"), hp::UnknownVariant);
}

TEST(Selector, Forms) {
    auto s = parse_selector("exp1:linda-free-text/original@gpt-4");
    EXPECT_EQ(s.experiment, "exp1");
    EXPECT_EQ(s.template_path, "linda-free-text/original");
    EXPECT_EQ(s.model, "gpt-4");
    EXPECT_EQ(s.to_string(), "exp1:linda-free-text/original@gpt-4");
    auto bare = parse_selector("itemset/hashed");
    EXPECT_TRUE(bare.experiment.empty());
    EXPECT_TRUE(bare.model.empty());
}

TEST(Plan, BundledPlansLoad) {
    for (const char* id : {"exp1", "exp2", "exp3", "exp4-free-text", "exp4-itemset", "exp4-tabular", "empty"}) {
        auto plan = bundled(id);
        EXPECT_EQ(plan.id, id);
        EXPECT_NO_THROW(plan.validate());
    }
    EXPECT_EQ(expand(bundled("exp1")).size(), 200u);
    EXPECT_EQ(expand(bundled("exp2")).size(), 150u);
    EXPECT_EQ(expand(bundled("exp3")).size(), 150u);
}

TEST(Plan, IterationsAreUniquePerVariantAndModel) {
    std::set<std::tuple<std::string, std::string, std::size_t>> seen;
    for (const auto& t : expand(bundled("exp2")))
        EXPECT_TRUE(seen.insert({format_variant(t.variant), t.model, t.iteration}).second);
}

TEST(Plan, RejectsBadConfigs) {
    EXPECT_THROW(parse_plan("id: x\nbogus: 1\n"), hp::ConfigError);
    EXPECT_THROW(parse_plan("id: x\ncassette: c.jsonl\ntrials:\n  - template: itemset/correct\n    model: m\n"),
                 hp::ConfigError);
    EXPECT_THROW(parse_plan("id: x\ncassette: c.jsonl\ntrials:\n  - template: linda-free-text/original\n    model: m\n"
                            "    lengths: [1]\n"),
                 hp::ConfigError);
    EXPECT_THROW(parse_plan("id: x\ncassette: c.jsonl\ntrials:\n  - template: linda-free-text/original\n    model: m\n"
                            "  - template: linda-free-text/original\n    model: m\n"),
                 hp::ConfigError);
    EXPECT_THROW(parse_plan("id: x\ntrials:\n  - template: linda-free-text/original\n    model: m\n"), hp::ConfigError);
    EXPECT_THROW(parse_plan("id: x\ncassette: c.jsonl\ntrials:\n  - template: linda-free-text/original\n    model: m\n"
                            "    iterations: 0\n"),
                 hp::ConfigError);
    EXPECT_THROW(parse_plan("id: x\nproviders:\n  m:\n    temperature: -1\n"), hp::ConfigError);
}

TEST(Plan, ProviderPresets) {
    auto plan = parse_plan("id: x\nproviders:\n  l2:\n    preset: llama2\n    endpoint: http://h/v1\n");
    const auto& p = plan.providers.at("l2");
    EXPECT_DOUBLE_EQ(p.sampling.temperature, 0.1);
    EXPECT_EQ(p.sampling.seed, 42);
    EXPECT_EQ(p.endpoint, "http://h/v1");
}

TEST(Replay, Exp1Tallies) {
    auto r = run_plan(bundled("exp1"));
    EXPECT_EQ(r.trials.size(), 200u);
    EXPECT_EQ(r.transport_errors, 0u);
    auto original = r.aggregate.pooled("linda-free-text/original");
    auto without = r.aggregate.pooled("linda-free-text/hashed-without-desc");
    auto with = r.aggregate.pooled("linda-free-text/hashed-with-desc");
    EXPECT_EQ(original.linda.correct(), 0u);
    EXPECT_EQ(original.linda.wrong(), 80u);
    EXPECT_EQ(without.linda.correct(), 14u);
    EXPECT_EQ(without.linda.wrong(), 26u);
    EXPECT_EQ(with.linda.correct(), 13u);
    EXPECT_EQ(with.linda.wrong(), 27u);

    const auto& a = pairing(r, "Original vs hashed without description").battery;
    EXPECT_EQ(a.table, (hp::stats::ContingencyTable2x2{0, 80, 14, 26}));
    EXPECT_NEAR(a.effect->cramers_v, 0.486, 0.001);
    EXPECT_LT(a.fisher_p, 1e-5);
    EXPECT_NEAR(pairing(r, "Original vs hashed with description").battery.effect->cramers_v, 0.465, 0.001);
}

TEST(Replay, Exp2PerfectResponder) {
    RunOptions opts;
    opts.cassette = source_path("data/cassettes/exp2-perfect.jsonl");
    auto r = run_plan(bundled("exp2"), opts);
    for (const char* cond : {"itemset/correct", "itemset/wrong", "itemset/hashed"})
        for (const char* model : {"gpt-4o", "llama-3.1-405b"}) {
            auto t = r.aggregate.pooled(cond, {model});
            EXPECT_EQ(t.itemset.found, 235u) << cond << " " << model;
            EXPECT_EQ(t.itemset.not_found, 0u);
            EXPECT_EQ(t.itemset.hallucinations, 0u);
            EXPECT_EQ(t.itemset.categories[0], 25u);
        }
}

TEST(Replay, PublishedItemsetAndTabularStatistics) {
    auto exp2 = run_plan(bundled("exp2"));
    EXPECT_EQ(exp2.aggregate.pooled("itemset/correct", {"gpt-4o"}).itemset.found, 213u);
    EXPECT_EQ(exp2.aggregate.pooled("itemset/wrong", {"gpt-4o"}).itemset.found, 212u);
    EXPECT_EQ(exp2.aggregate.pooled("itemset/hashed", {"gpt-4o"}).itemset.found, 225u);
    EXPECT_NEAR(pairing(exp2, "GPT-4o hashed vs correct").battery.effect->cramers_v, 0.093, 0.001);
    EXPECT_NEAR(pairing(exp2, "GPT-4o hashed vs correct").battery.chi_square->p, 0.043, 0.002);
    EXPECT_NEAR(pairing(exp2, "GPT-4o hashed vs wrong").battery.effect->cramers_v, 0.1, 0.001);
    EXPECT_NEAR(pairing(exp2, "Llama 3.1 405B hashed vs correct").battery.effect->cramers_v, 0.25, 0.001);
    EXPECT_NEAR(pairing(exp2, "Llama 3.1 405B hashed vs wrong").battery.effect->cramers_v, 0.216, 0.001);
    EXPECT_LT(pairing(exp2, "Llama 3.1 405B hashed vs correct").battery.chi_square->p, 1e-5);
    EXPECT_LT(pairing(exp2, "Llama 3.1 405B hashed vs wrong").battery.chi_square->p, 1e-5);

    auto exp3 = run_plan(bundled("exp3"));
    const auto& t = pairing(exp3, "Not hashed vs hashed without relationships").battery;
    EXPECT_EQ(t.table, (hp::stats::ContingencyTable2x2{11, 39, 32, 18}));
    EXPECT_NEAR(t.effect->cramers_v, 0.404, 0.001);
    EXPECT_NEAR(t.chi_square->p, 5.35e-5, 0.01e-5);
}

TEST(Replay, ReasoningModelComparisons) {
    auto ft = run_plan(bundled("exp4-free-text"));
    EXPECT_NEAR(pairing(ft, "o3-mini vs GPT-4").battery.effect->cramers_v, 0.619, 0.001);
    EXPECT_NEAR(pairing(ft, "Gemini 2 Flash Thinking vs Gemini").battery.effect->cramers_v, 0.925, 0.001);
    auto tab = run_plan(bundled("exp4-tabular"));
    EXPECT_NEAR(pairing(tab, "Gemini 2 Flash Thinking vs Gemini").battery.effect->cramers_v, 0.9, 0.001);
    EXPECT_NEAR(pairing(tab, "GPT-4o hashed without relationships vs o3-mini").battery.effect->cramers_v, 0.3, 0.001);
    auto is = run_plan(bundled("exp4-itemset"));
    EXPECT_NEAR(pairing(is, "Gemini 2 Flash Thinking correct vs Llama 3.1 405B hashed").battery.effect->cramers_v,
                0.452, 0.001);
    EXPECT_NEAR(pairing(is, "Gemini 2 Flash Thinking wrong vs Llama 3.1 405B hashed").battery.effect->cramers_v,
                0.274, 0.001);
    for (const auto& r : {ft, tab, is})
        for (const auto& p : r.pairings) EXPECT_TRUE(p.error.empty()) << p.pairing.name << ": " << p.error;
}

TEST(Replay, ReportsAreByteIdentical) {
    auto a = render_markdown(run_plan(bundled("exp2")));
    auto b = render_markdown(run_plan(bundled("exp2")));
    EXPECT_EQ(a, b);
    EXPECT_EQ(render_json(run_plan(bundled("exp1"))).dump(), render_json(run_plan(bundled("exp1"))).dump());
}

TEST(Replay, WorkerCountDoesNotMatter) {
    RunOptions one, many;
    one.workers = 1;
    many.workers = 16;
    auto a = run_plan(bundled("exp1"), one);
    auto b = run_plan(bundled("exp1"), many);
    EXPECT_EQ(render_markdown(a), render_markdown(b));
    ASSERT_EQ(a.trials.size(), b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].record, b.trials[i].record);
}

TEST(Replay, AggregationIgnoresOrder) {
    auto r = run_plan(bundled("exp2"));
    auto trials = r.trials;
    std::mt19937 rng(1);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(trials.begin(), trials.end(), rng);
        auto agg = hp::judge::aggregate(trials);
        EXPECT_EQ(agg.cells, r.aggregate.cells);
    }
}

TEST(Replay, ScoredFileRoundTrip) {
    auto dir = scratch("scored");
    auto r = run_plan(bundled("exp1"));
    write_outputs(r, dir.string());
    EXPECT_TRUE(fs::exists(dir / "exp1.report.md"));
    EXPECT_TRUE(fs::exists(dir / "exp1.report.json"));
    auto back = read_scored((dir / "exp1.scored.jsonl").string());
    EXPECT_EQ(hp::judge::aggregate(back), hp::judge::aggregate(r.trials));
    fs::remove_all(dir);
}

TEST(Replay, MissingCassetteAndMisses) {
    auto plan = bundled("exp1");
    RunOptions opts;
    opts.cassette = "/nonexistent/cassette.jsonl";
    EXPECT_THROW(run_plan(plan, opts), hp::ConfigError);

    auto dir = scratch("miss");
    auto text = slurp(source_path("data/cassettes/exp1.jsonl"));
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    std::ofstream(dir / "short.jsonl") << text;
    opts.cassette = (dir / "short.jsonl").string();
    EXPECT_THROW(run_plan(plan, opts), hp::CassetteMiss);
    fs::remove_all(dir);
}

TEST(Replay, EmptyPlan) {
    auto r = run_plan(bundled("empty"));
    EXPECT_TRUE(r.trials.empty());
    EXPECT_FALSE(r.any_errors());
    EXPECT_NE(render_markdown(r).find("No trials were planned."), std::string::npos);
}

TEST(Record, ThenReplayReproducesTheRun) {
    auto dir = scratch("record");
    auto plan = parse_plan("id: rec\ncassette: rec.jsonl\ntrials:\n  - template: linda-free-text/original\n"
                           "    model: m\n    iterations: 3\n  - template: linda-free-text/hashed-with-desc\n"
                           "    model: m\n    iterations: 2\n",
                           dir.string());
    auto backend = std::make_shared<CannedBackend>();
    RunOptions live;
    live.live = true;
    live.backend = backend;
    auto recorded = run_plan(plan, live);
    EXPECT_EQ(recorded.mode, hp::gateway::Mode::Record);
    EXPECT_EQ(backend->calls.load(), 5);
    EXPECT_EQ(hp::gateway::Cassette::load((dir / "rec.jsonl").string()).size(), 5u);
    EXPECT_EQ(recorded.aggregate.pooled("linda-free-text/original").linda.correct(), 3u);
    EXPECT_EQ(recorded.aggregate.pooled("linda-free-text/hashed-with-desc").linda.correct(), 2u);

    auto replayed = run_plan(plan);
    EXPECT_EQ(backend->calls.load(), 5);
    EXPECT_EQ(replayed.aggregate, recorded.aggregate);
    fs::remove_all(dir);
}

TEST(Record, LivePlanNeedsTheLiveSwitch) {
    auto plan = parse_plan("id: l\nmode: live\ntrials:\n  - template: linda-free-text/original\n    model: m\n");
    EXPECT_THROW(run_plan(plan), hp::ConfigError);
    RunOptions live;
    live.live = true;
    EXPECT_THROW(run_plan(plan, live), hp::ConfigError);  // no endpoint for m
}

TEST(Record, TransportErrorsAreRecordedNotThrown) {
    auto plan = parse_plan("id: l\nmode: live\ntrials:\n  - template: linda-free-text/original\n    model: m\n"
                           "    iterations: 2\n");
    RunOptions live;
    live.live = true;
    live.backend = std::make_shared<CannedBackend>(hp::gateway::Status::TransportError);
    live.retry = {2, std::chrono::milliseconds(1)};
    auto r = run_plan(plan, live);
    EXPECT_EQ(r.transport_errors, 2u);
    EXPECT_TRUE(r.any_errors());
    EXPECT_EQ(r.trials.size(), 2u);
    EXPECT_FALSE(r.trials[0].verdict);
    EXPECT_NE(render_markdown(r).find("INCOMPLETE"), std::string::npos);
}

TEST(Record, RefusalsCountAsNonAnswers) {
    auto plan = parse_plan("id: l\nmode: live\ntrials:\n  - template: linda-free-text/original\n    model: m\n");
    RunOptions live;
    live.live = true;
    live.backend = std::make_shared<CannedBackend>(hp::gateway::Status::Refusal);
    auto r = run_plan(plan, live);
    EXPECT_EQ(r.transport_errors, 0u);
    auto t = r.aggregate.pooled("linda-free-text/original");
    EXPECT_EQ(t.linda.neither, 1u);
    EXPECT_EQ(t.refusals, 1u);
}

TEST(Cassettes, ShippedCassettesMatchRegeneration) {
    for (const char* id : {"exp1", "exp2", "exp3", "exp4-free-text", "exp4-itemset", "exp4-tabular"}) {
        auto plan = bundled(id);
        auto text = hp::fixtures::serialize_cassette(
            hp::fixtures::synthesize_cassette(plan, hp::fixtures::published_responder(plan)));
        EXPECT_EQ(text, slurp(source_path(std::string("data/cassettes/") + id + ".jsonl"))) << id;
    }
    auto exp2 = bundled("exp2");
    EXPECT_EQ(hp::fixtures::serialize_cassette(hp::fixtures::synthesize_cassette(exp2, hp::fixtures::perfect_responder())),
              slurp(source_path("data/cassettes/exp2-perfect.jsonl")));
}

TEST(Fixtures, PlannedRunsHitTheTargets) {
    std::vector<std::size_t> sizes;
    for (std::size_t k = 1; k <= 5; ++k)
        for (int i = 0; i < 5; ++i) sizes.push_back(oracle_for(hp::prompts::Dataset::Correct, k).size());
    hp::fixtures::ItemsetTarget target{std::nullopt, 213, 22, std::nullopt};
    auto runs = hp::fixtures::plan_itemset_runs(sizes, target);
    ASSERT_EQ(runs.size(), sizes.size());
    std::size_t missing = 0;
    for (const auto& r : runs) missing += r.missing;
    EXPECT_EQ(missing, 22u);
}

TEST(Cli, EmptyPlanExitsZero) { EXPECT_EQ(run_cli("run --config " + source_path("configs/empty.yaml")), 0); }

TEST(Cli, ReplayExitsZero) { EXPECT_EQ(run_cli("run --config " + source_path("configs/exp1.yaml")), 0); }

TEST(Cli, TransportErrorsExitTwo) {
    auto dir = scratch("cli-transport");
    std::ofstream(dir / "down.yaml") << "id: down\nmode: live\ncassette: down.jsonl\nproviders:\n  m:\n"
                                        "    endpoint: http://127.0.0.1:1/v1/chat/completions\n"
                                        "trials:\n  - template: linda-free-text/original\n    model: m\n";
    EXPECT_EQ(run_cli("run --live --config " + (dir / "down.yaml").string() + " --out " + dir.string()), 2);
    EXPECT_TRUE(fs::exists(dir / "down.report.md"));
    fs::remove_all(dir);
}

TEST(Cli, BadArgumentsExitOne) {
    EXPECT_EQ(run_cli("run --config /nonexistent.yaml"), 1);
    EXPECT_EQ(run_cli("stats 1 2 3"), 1);
}

TEST(Cli, OtherSubcommands) {
    EXPECT_EQ(run_cli("render itemset/correct@3"), 0);
    EXPECT_EQ(run_cli("render --list"), 0);
    EXPECT_EQ(run_cli("hash --text 'Imagine a woman'"), 0);
    EXPECT_EQ(run_cli("mine --dataset correct --support 2"), 0);
    EXPECT_EQ(run_cli("derive --dataset correct --bijection " + source_path("data/bijections/wrong.txt")), 0);
    EXPECT_EQ(run_cli("stats 0 80 14 26"), 0);
}
