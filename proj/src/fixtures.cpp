#include "hashprompt/fixtures.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "hashprompt/corpus.hpp"
#include "hashprompt/error.hpp"
#include "hashprompt/miner.hpp"

namespace hashprompt::fixtures {

namespace {

using judge::Choice;
using judge::LindaTally;

constexpr int kLengths = 5;
constexpr std::size_t kRepetitions = 5;

const corpus::TransactionTable& table_for(prompts::Dataset d) {
    const auto& data = corpus::builtin_datasets();
    switch (d) {
        case prompts::Dataset::Correct: return data.csv_correct;
        case prompts::Dataset::Wrong: return data.csv_wrong;
        case prompts::Dataset::Hashed: return data.csv_hashed;
    }
    return data.csv_correct;
}

// (template, model) -> published counts.
using LindaTable = std::map<std::pair<std::string, std::string>, LindaTally>;
using ItemsetTable = std::map<std::pair<std::string, std::string>, ItemsetTarget>;

LindaTally correct_of(std::size_t correct, std::size_t total) { return {correct, total - correct, 0}; }

const LindaTable& exp1_tallies() {
    static const LindaTable t{
        {{"linda-free-text/original", "gemini"}, {0, 1, 19}},
        {{"linda-free-text/original", "gpt-3.5"}, {0, 20, 0}},
        {{"linda-free-text/original", "gpt-4"}, {0, 20, 0}},
        {{"linda-free-text/original", "llama-2-70b"}, {0, 20, 0}},
        {{"linda-free-text/hashed-with-desc", "gemini"}, {0, 10, 0}},
        {{"linda-free-text/hashed-with-desc", "gpt-3.5"}, {3, 7, 0}},
        {{"linda-free-text/hashed-with-desc", "gpt-4"}, {10, 0, 0}},
        {{"linda-free-text/hashed-with-desc", "llama-2-70b"}, {0, 10, 0}},
        {{"linda-free-text/hashed-without-desc", "gemini"}, {10, 0, 0}},
        {{"linda-free-text/hashed-without-desc", "gpt-3.5"}, {3, 7, 0}},
        {{"linda-free-text/hashed-without-desc", "gpt-4"}, {1, 9, 0}},
        {{"linda-free-text/hashed-without-desc", "llama-2-70b"}, {0, 10, 0}},
        {{"linda-free-text/validation", "gemini"}, {0, 10, 0}},
        {{"linda-free-text/validation", "gpt-3.5"}, {0, 10, 0}},
        {{"linda-free-text/validation", "gpt-4"}, {0, 10, 0}},
        {{"linda-free-text/validation", "llama-2-70b"}, {0, 10, 0}},
    };
    return t;
}

const LindaTable& exp3_tallies() {
    static const LindaTable t = [] {
        const std::vector<std::string> models{"gpt-4o", "gemini", "llama-3.1-70b", "llama-3.1-405b",
                                              "mixtral-large-2"};
        const std::map<std::string, std::vector<std::size_t>> correct{
            {"linda-tabular/not-hashed", {4, 0, 0, 0, 7}},
            {"linda-tabular/hashed-without-rel", {7, 0, 8, 10, 7}},
            {"linda-tabular/hashed-with-rel", {7, 0, 0, 7, 0}},
        };
        LindaTable out;
        for (const auto& [path, counts] : correct)
            for (std::size_t i = 0; i < models.size(); ++i) out[{path, models[i]}] = correct_of(counts[i], 10);
        return out;
    }();
    return t;
}

const LindaTable& exp4_free_text_tallies() {
    static const LindaTable t{
        {{"linda-free-text/original", "o3-mini"}, correct_of(6, 10)},
        {{"linda-free-text/original", "gemini-2-flash-thinking"}, correct_of(10, 10)},
    };
    return t;
}

const LindaTable& exp4_tabular_tallies() {
    static const LindaTable t{
        {{"linda-tabular/not-hashed", "o3-mini"}, correct_of(3, 10)},
        {{"linda-tabular/not-hashed", "gemini-2-flash-thinking"}, correct_of(10, 10)},
    };
    return t;
}

ItemsetTarget categorized(std::array<std::size_t, 4> categories, std::size_t found) {
    return {categories, found, 235 - found, std::nullopt};
}

const ItemsetTable& exp2_targets() {
    static const ItemsetTable t{
        {{"itemset/correct", "gpt-4o"}, categorized({14, 4, 6, 1}, 213)},
        {{"itemset/wrong", "gpt-4o"}, categorized({13, 6, 2, 4}, 212)},
        {{"itemset/hashed", "gpt-4o"}, categorized({15, 6, 4, 0}, 225)},
        {{"itemset/correct", "llama-3.1-405b"}, categorized({7, 8, 10, 0}, 194)},
        {{"itemset/wrong", "llama-3.1-405b"}, categorized({5, 11, 6, 3}, 201)},
        {{"itemset/hashed", "llama-3.1-405b"}, categorized({5, 18, 0, 2}, 230)},
    };
    return t;
}

const ItemsetTable& exp4_itemset_targets() {
    static const ItemsetTable t{
        {{"itemset/correct", "o3-mini"}, {std::nullopt, 220, 15, 9}},
        {{"itemset/wrong", "o3-mini"}, {std::nullopt, 217, 18, 18}},
        {{"itemset/correct", "gemini-2-flash-thinking"}, {std::nullopt, 143, 92, 18}},
        {{"itemset/wrong", "gemini-2-flash-thinking"}, {std::nullopt, 189, 46, 20}},
    };
    return t;
}

std::vector<std::size_t> oracle_sizes() {
    std::vector<std::size_t> sizes;
    for (int len = 1; len <= kLengths; ++len)
        for (std::size_t rep = 0; rep < kRepetitions; ++rep)
            sizes.push_back(runner::oracle_for(prompts::Dataset::Correct, static_cast<std::size_t>(len)).size());
    return sizes;
}

std::vector<judge::ItemSet> oracle_sets(prompts::Dataset d, std::size_t length) {
    std::vector<judge::ItemSet> out;
    for (const auto& s : runner::oracle_for(d, length)) out.push_back(s.items);
    return out;
}

std::pair<gateway::Status, std::string> itemset_reply(const runner::PlannedTrial& t, RunShape shape) {
    const auto d = t.variant.ref.dataset;
    const auto len = static_cast<std::size_t>(t.variant.length);
    auto sets = oracle_sets(d, len);
    sets.resize(sets.size() - std::min(shape.missing, sets.size()));
    auto fake = hallucinated_sets(d, len, shape.hallucinated);
    sets.insert(sets.end(), fake.begin(), fake.end());
    return {gateway::Status::Ok, itemset_answer(sets)};
}

}  // namespace

std::string linda_answer(Choice choice, const prompts::LindaKey& key) {
    switch (choice) {
        case Choice::NonConjunction: return (key.lettered ? "A) " : "") + key.options[0];
        case Choice::Conjunction: return (key.lettered ? "B) " : "") + key.options[1];
        case Choice::Neither: break;
    }
    return "I cannot determine which option is more likely without more information about her.";
}

std::string itemset_answer(const std::vector<judge::ItemSet>& sets) {
    std::string out;
    for (const auto& s : sets) out += miner::format_itemset(s) + "\n";
    return out;
}

std::vector<RunShape> plan_itemset_runs(const std::vector<std::size_t>& sizes, const ItemsetTarget& target) {
    const std::size_t runs = sizes.size();
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (target.found + target.not_found != total)
        throw Error("found + not found must equal the oracle total " + std::to_string(total));

    std::vector<RunShape> out(runs);
    // Largest oracles first; ties keep run order.
    std::vector<std::size_t> order(runs);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sizes[a] > sizes[b]; });

    std::vector<std::size_t> lower_recall;
    if (target.categories) {
        const auto& c = *target.categories;
        if (c[0] + c[1] + c[2] + c[3] != runs) throw Error("category counts must sum to the run count");
        lower_recall.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c[2] + c[3]));
    } else {
        lower_recall = order;
    }

    // Distribute missing itemsets: one per lower-recall run, then up to size - 1, then up to size.
    std::size_t remaining = target.not_found;
    if (target.categories) {
        if (remaining < lower_recall.size()) throw Error("too few missing itemsets for the lower-recall runs");
        for (auto i : lower_recall) out[i].missing = 1;
        remaining -= lower_recall.size();
    }
    for (std::size_t cap_slack : {std::size_t{1}, std::size_t{0}}) {
        for (auto i : lower_recall) {
            if (remaining == 0) break;
            std::size_t cap = sizes[i] > cap_slack ? sizes[i] - cap_slack : 0;
            std::size_t add = std::min(cap > out[i].missing ? cap - out[i].missing : 0, remaining);
            out[i].missing += add;
            remaining -= add;
        }
    }
    if (remaining != 0) throw Error("missing itemsets exceed the lower-recall capacity");

    std::vector<std::size_t> lower_precision;
    if (target.categories) {
        const auto& c = *target.categories;
        lower_precision.assign(lower_recall.end() - static_cast<std::ptrdiff_t>(c[3]), lower_recall.end());
        std::set<std::size_t> in_recall(lower_recall.begin(), lower_recall.end());
        for (std::size_t i = 0; i < runs && lower_precision.size() < c[1] + c[3]; ++i)
            if (!in_recall.contains(i)) lower_precision.push_back(i);
        if (lower_precision.size() != c[1] + c[3]) throw Error("not enough runs for the lower-precision categories");
    } else {
        for (std::size_t i = 0; i < runs && lower_precision.size() < target.hallucinations.value_or(0); ++i)
            lower_precision.push_back(i);
    }

    std::size_t h = target.hallucinations.value_or(lower_precision.size());
    if (h < lower_precision.size() || (h > 0 && lower_precision.empty()))
        throw Error("hallucination count does not fit the lower-precision runs");
    for (std::size_t k = 0; k < h; ++k) ++out[lower_precision[k % lower_precision.size()]].hallucinated;
    return out;
}

std::vector<judge::ItemSet> hallucinated_sets(prompts::Dataset dataset, std::size_t length, std::size_t count) {
    std::vector<judge::ItemSet> out;
    if (count == 0) return out;
    std::set<std::string> values;
    for (const auto& row : table_for(dataset).rows) values.insert(row.begin(), row.end());
    const std::vector<std::string> pool(values.begin(), values.end());
    std::set<judge::ItemSet> frequent;
    for (const auto& s : runner::oracle_for(dataset, length)) frequent.insert(s.items);

    // Lexicographic combinations of `length` pool indices.
    std::vector<std::size_t> idx(length);
    std::iota(idx.begin(), idx.end(), 0);
    while (out.size() < count) {
        judge::ItemSet s;
        for (auto i : idx) s.push_back(pool[i]);
        if (!frequent.contains(s)) out.push_back(std::move(s));
        std::size_t k = length;
        while (k > 0 && idx[k - 1] == pool.size() - length + k - 1) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < length; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (out.size() < count) throw Error("not enough infrequent sets for the requested hallucinations");
    return out;
}

Responder perfect_responder() {
    return [](const runner::PlannedTrial& t) -> std::pair<gateway::Status, std::string> {
        if (const auto* key = std::get_if<prompts::LindaKey>(&t.prompt.answer_key))
            return {gateway::Status::Ok, linda_answer(Choice::NonConjunction, *key)};
        return {gateway::Status::Ok,
                itemset_answer(oracle_sets(t.variant.ref.dataset, static_cast<std::size_t>(t.variant.length)))};
    };
}

Responder published_responder(const runner::ExperimentPlan& plan) {
    const LindaTable* linda = nullptr;
    const ItemsetTable* itemset = nullptr;
    if (plan.id == "exp1")
        linda = &exp1_tallies();
    else if (plan.id == "exp3")
        linda = &exp3_tallies();
    else if (plan.id == "exp4-free-text")
        linda = &exp4_free_text_tallies();
    else if (plan.id == "exp4-tabular")
        linda = &exp4_tabular_tallies();
    else if (plan.id == "exp2")
        itemset = &exp2_targets();
    else if (plan.id == "exp4-itemset")
        itemset = &exp4_itemset_targets();
    else
        throw ConfigError("no published tallies for plan '" + plan.id + "'");

    std::map<std::pair<std::string, std::string>, std::vector<RunShape>> shapes;
    if (itemset) {
        const auto sizes = oracle_sizes();
        for (const auto& [key, target] : *itemset) shapes[key] = plan_itemset_runs(sizes, target);
    }

    return [linda, shapes = std::move(shapes)](const runner::PlannedTrial& t) -> std::pair<gateway::Status, std::string> {
        const std::pair<std::string, std::string> key{prompts::template_path(t.variant.ref), t.model};
        if (const auto* answer_key = std::get_if<prompts::LindaKey>(&t.prompt.answer_key)) {
            auto it = linda ? linda->find(key) : decltype(linda->end()){};
            if (!linda || it == linda->end())
                throw ConfigError("no published tally for " + key.first + " / " + key.second);
            const auto& tally = it->second;
            if (t.iteration >= tally.total())
                throw ConfigError(key.first + " / " + key.second + " has only " + std::to_string(tally.total()) +
                                  " published answers");
            Choice c = t.iteration < tally.non_conjunction                       ? Choice::NonConjunction
                       : t.iteration < tally.non_conjunction + tally.conjunction ? Choice::Conjunction
                                                                                 : Choice::Neither;
            return {gateway::Status::Ok, linda_answer(c, *answer_key)};
        }
        auto it = shapes.find(key);
        if (it == shapes.end()) throw ConfigError("no published itemset counts for " + key.first + " / " + key.second);
        if (t.iteration >= kRepetitions) throw ConfigError("published itemset counts cover 5 repetitions");
        const auto run = static_cast<std::size_t>(t.variant.length - 1) * kRepetitions + t.iteration;
        return itemset_reply(t, it->second.at(run));
    };
}

std::vector<gateway::CassetteEntry> synthesize_cassette(const runner::ExperimentPlan& plan,
                                                        const Responder& responder) {
    std::vector<gateway::CassetteEntry> out;
    for (const auto& t : runner::expand(plan)) {
        auto [status, text] = responder(t);
        gateway::TrialKey key{plan.id, runner::format_variant(t.variant), t.model, t.iteration,
                              gateway::prompt_digest(t.prompt.text)};
        out.push_back({std::move(key), t.prompt.text, std::move(text), status, kFixtureTimestamp});
    }
    return out;
}

std::string serialize_cassette(const std::vector<gateway::CassetteEntry>& entries) {
    std::string out;
    for (const auto& e : entries) out += gateway::to_json(e).dump() + "\n";
    return out;
}

}  // namespace hashprompt::fixtures
