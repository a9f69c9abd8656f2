#include "hashprompt/judge.hpp"

#include <algorithm>
#include <set>

#include "hashprompt/error.hpp"
#include "text_util.hpp"

namespace hashprompt::judge {

using nlohmann::json;

namespace {

// Lowercase, markdown emphasis dropped, whitespace runs collapsed to one space.
std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == '*' || c == '`') continue;
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ' ')) s.pop_back();
    return s;
}

std::vector<std::size_t> find_all(const std::string& hay, const std::string& needle) {
    std::vector<std::size_t> out;
    if (needle.empty()) return out;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) out.push_back(p);
    return out;
}

struct LetterMark {
    std::size_t pos;
    std::size_t option;
    std::string text;
};

std::vector<LetterMark> letter_marks(const std::string& norm) {
    std::vector<LetterMark> marks;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        char c = norm[i];
        if (c != 'a' && c != 'b') continue;
        std::size_t option = c == 'a' ? 0 : 1;
        bool left_ok = i == 0 || !detail::is_word_char(norm[i - 1]);
        if (left_ok && i + 1 < norm.size() && norm[i + 1] == ')') {
            marks.push_back({i, option, norm.substr(i, 2)});
            continue;
        }
        bool right_ok = i + 1 >= norm.size() || !detail::is_word_char(norm[i + 1]);
        if (!right_ok) continue;
        for (std::string_view lead : {"option ", "option (", "answer: ", "answer is ", "answer is: "}) {
            if (i >= lead.size() && norm.compare(i - lead.size(), lead.size(), lead) == 0) {
                marks.push_back({i - lead.size(), option, norm.substr(i - lead.size(), lead.size() + 1)});
                break;
            }
        }
    }
    std::sort(marks.begin(), marks.end(), [](const auto& a, const auto& b) { return a.pos < b.pos; });
    return marks;
}

bool followed_by_clause(const std::string& norm, std::size_t end) {
    for (std::string_view w : {" who ", " who,", " and ", " that ", " which "})
        if (norm.compare(end, w.size(), w) == 0) return true;
    return false;
}

constexpr std::string_view kHedges[] = {
    "more information",   "more info",       "not enough information", "insufficient information",
    "cannot determine",   "can't determine", "cannot be determined",   "impossible to",
    "unable to",          "i cannot",        "i can't",                "not possible to",
    "equally likely",     "neither",         "both options",           "no way to know",
    "cannot answer",      "can't answer",    "depends on",             "need more context",
};

}  // namespace

std::string_view to_string(Choice c) {
    switch (c) {
        case Choice::NonConjunction: return "non-conjunction";
        case Choice::Conjunction: return "conjunction";
        case Choice::Neither: return "neither";
    }
    return "?";
}

Choice parse_choice(std::string_view s) {
    if (s == "non-conjunction") return Choice::NonConjunction;
    if (s == "conjunction") return Choice::Conjunction;
    if (s == "neither") return Choice::Neither;
    throw ConfigError("unknown choice '" + std::string(s) + "'");
}

LindaVerdict classify_linda(std::string_view response, const std::array<std::string, 2>& options) {
    const std::string norm = normalize(response);
    std::array<std::string, 2> opt{strip_trailing_punct(normalize(options[0])), strip_trailing_punct(normalize(options[1]))};

    std::size_t conj = 1;
    if (opt[0].size() > opt[1].size() && opt[0].find(opt[1]) != std::string::npos) conj = 0;
    const std::size_t single = 1 - conj;
    auto choice_of = [&](std::size_t option) { return option == conj ? Choice::Conjunction : Choice::NonConjunction; };

    // 1. Explicit option letters.
    auto marks = letter_marks(norm);
    if (!marks.empty()) {
        bool both = std::any_of(marks.begin(), marks.end(), [&](const auto& m) { return m.option != marks[0].option; });
        if (!both) return {choice_of(marks[0].option), marks[0].text, false};
        bool leads = marks[0].pos <= 2;
        if (leads) return {choice_of(marks[0].option), marks[0].text, false};
    }

    // 2. Verbatim option text; the single-property text only counts when it stands alone.
    const auto conj_hits = find_all(norm, opt[conj]);
    bool conj_mentioned = !conj_hits.empty();
    bool single_mentioned = false;
    for (std::size_t p : find_all(norm, opt[single])) {
        bool inside = std::any_of(conj_hits.begin(), conj_hits.end(),
                                  [&](std::size_t c) { return p >= c && p < c + opt[conj].size(); });
        if (inside) continue;
        if (followed_by_clause(norm, p + opt[single].size())) {
            conj_mentioned = true;
            continue;
        }
        single_mentioned = true;
    }
    if (conj_mentioned && single_mentioned) return {Choice::Neither, "both options mentioned", true};
    if (conj_mentioned) return {Choice::Conjunction, opt[conj], false};
    if (single_mentioned) return {Choice::NonConjunction, opt[single], false};

    // 3. Hedging and refusals.
    for (std::string_view hedge : kHedges)
        if (norm.find(hedge) != std::string::npos) return {Choice::Neither, std::string(hedge), false};

    return {Choice::Neither, marks.empty() ? "no option recognised" : "both option letters", !marks.empty()};
}

std::vector<ItemSet> parse_itemsets(std::string_view response) {
    std::string text;
    text.reserve(response.size());
    for (std::size_t i = 0; i < response.size(); ++i) {
        // Typographic quotes: U+201C, U+201D, U+201E, U+2018, U+2019.
        if (i + 2 < response.size() && static_cast<unsigned char>(response[i]) == 0xE2 &&
            static_cast<unsigned char>(response[i + 1]) == 0x80) {
            unsigned char c = static_cast<unsigned char>(response[i + 2]);
            if (c == 0x9C || c == 0x9D || c == 0x9E) {
                text += '"';
                i += 2;
                continue;
            }
            if (c == 0x98 || c == 0x99) {
                text += '\'';
                i += 2;
                continue;
            }
        }
        text += response[i];
    }

    struct Open {
        std::size_t start;
        bool has_child;
    };
    std::vector<Open> stack;
    std::vector<ItemSet> out;
    std::set<ItemSet> seen;
    char quote = 0;

    auto parse_group = [&](std::string_view body) {
        ItemSet items;
        std::string token;
        char q = 0;
        auto flush = [&] {
            std::string_view t = detail::trim(token);
            if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front())
                t = detail::trim(t.substr(1, t.size() - 2));
            if (!t.empty()) items.emplace_back(t);
            token.clear();
        };
        for (char c : body) {
            if (q) {
                if (c == q) q = 0;
                token += c;
            } else if (c == '"' || c == '\'') {
                q = c;
                token += c;
            } else if (c == ',') {
                flush();
            } else {
                token += c;
            }
        }
        flush();
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        if (!items.empty() && seen.insert(items).second) out.push_back(std::move(items));
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (!stack.empty() && (c == '"' || c == '\'')) {
            quote = c;
        } else if (c == '{') {
            if (!stack.empty()) stack.back().has_child = true;
            stack.push_back({i + 1, false});
        } else if (c == '}' && !stack.empty()) {
            Open open = stack.back();
            stack.pop_back();
            if (!open.has_child) parse_group(std::string_view(text).substr(open.start, i - open.start));
        } else if (c == '\n' && !stack.empty()) {
            // Quotes never span lines; an unmatched apostrophe cannot swallow the rest.
            quote = 0;
        }
    }
    return out;
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::PerfectPrecisionPerfectRecall: return "perfect-precision-perfect-recall";
        case Category::PerfectRecallLowerPrecision: return "perfect-recall-lower-precision";
        case Category::PerfectPrecisionLowerRecall: return "perfect-precision-lower-recall";
        case Category::LowerPrecisionLowerRecall: return "lower-precision-lower-recall";
    }
    return "?";
}

std::string_view label(Category c) {
    switch (c) {
        case Category::PerfectPrecisionPerfectRecall: return "Perfect precision and perfect recall";
        case Category::PerfectRecallLowerPrecision: return "Perfect recall, lower precision";
        case Category::PerfectPrecisionLowerRecall: return "Perfect precision, lower recall";
        case Category::LowerPrecisionLowerRecall: return "Lower precision, lower recall";
    }
    return "?";
}

Category parse_category(std::string_view s) {
    for (auto c : {Category::PerfectPrecisionPerfectRecall, Category::PerfectRecallLowerPrecision,
                   Category::PerfectPrecisionLowerRecall, Category::LowerPrecisionLowerRecall})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown category '" + std::string(s) + "'");
}

Category categorize(bool perfect_precision, bool perfect_recall) {
    if (perfect_precision && perfect_recall) return Category::PerfectPrecisionPerfectRecall;
    if (perfect_recall) return Category::PerfectRecallLowerPrecision;
    if (perfect_precision) return Category::PerfectPrecisionLowerRecall;
    return Category::LowerPrecisionLowerRecall;
}

ScoreBreakdown score_run(const std::vector<ItemSet>& parsed, const std::vector<miner::Itemset>& oracle,
                         const miner::MiningTask& task) {
    std::set<ItemSet> truth;
    for (const auto& s : oracle) truth.insert(s.items);

    std::set<ItemSet> output;
    for (ItemSet s : parsed) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        output.insert(std::move(s));
    }

    ScoreBreakdown b;
    for (const auto& s : output) {
        if (s.size() == task.length && truth.contains(s))
            ++b.tp;
        else
            ++b.fp;
    }
    b.found = b.tp;
    b.not_found = truth.size() - b.tp;
    b.empty_output = output.empty();
    b.precision = output.empty() ? 1.0 : static_cast<double>(b.tp) / static_cast<double>(output.size());
    b.recall = truth.empty() ? 1.0 : static_cast<double>(b.tp) / static_cast<double>(truth.size());
    b.category = categorize(b.fp == 0, b.tp == truth.size());
    return b;
}

json to_json(const ScoredTrial& t) {
    json j = gateway::to_json(t.record);
    j["condition"] = t.condition;
    if (t.length) j["length"] = *t.length;
    if (t.verdict)
        j["verdict"] = {{"choice", to_string(t.verdict->choice)},
                        {"evidence", t.verdict->evidence},
                        {"ambiguous", t.verdict->ambiguous}};
    if (t.score)
        j["score"] = {
            {"tp", t.score->tp},
            {"fp", t.score->fp},
            {"found", t.score->found},
            {"not_found", t.score->not_found},
            {"precision", t.score->precision},
            {"recall", t.score->recall},
            {"category", to_string(t.score->category)},
            {"empty_output", t.score->empty_output},
        };
    return j;
}

ScoredTrial scored_from_json(const json& j) {
    ScoredTrial t;
    t.record = gateway::trial_from_json(j);
    t.condition = j.at("condition").get<std::string>();
    if (j.contains("length")) t.length = j["length"].get<std::size_t>();
    if (j.contains("verdict")) {
        const auto& v = j["verdict"];
        t.verdict = LindaVerdict{parse_choice(v.at("choice").get<std::string>()), v.value("evidence", ""),
                                 v.value("ambiguous", false)};
    }
    if (j.contains("score")) {
        const auto& s = j["score"];
        ScoreBreakdown b;
        b.tp = s.at("tp").get<std::size_t>();
        b.fp = s.at("fp").get<std::size_t>();
        b.found = s.at("found").get<std::size_t>();
        b.not_found = s.at("not_found").get<std::size_t>();
        b.precision = s.at("precision").get<double>();
        b.recall = s.at("recall").get<double>();
        b.category = parse_category(s.at("category").get<std::string>());
        b.empty_output = s.value("empty_output", false);
        t.score = b;
    }
    return t;
}

ConditionTally Aggregate::pooled(const std::string& condition, const std::vector<std::string>& models) const {
    ConditionTally out;
    for (const auto& [key, tally] : cells) {
        if (key.first != condition) continue;
        if (!models.empty() && std::find(models.begin(), models.end(), key.second) == models.end()) continue;
        out.trials += tally.trials;
        out.transport_errors += tally.transport_errors;
        out.refusals += tally.refusals;
        out.linda.non_conjunction += tally.linda.non_conjunction;
        out.linda.conjunction += tally.linda.conjunction;
        out.linda.neither += tally.linda.neither;
        auto& is = out.itemset;
        is.runs += tally.itemset.runs;
        is.found += tally.itemset.found;
        is.not_found += tally.itemset.not_found;
        is.hallucinations += tally.itemset.hallucinations;
        is.empty_outputs += tally.itemset.empty_outputs;
        for (std::size_t i = 0; i < 4; ++i) is.categories[i] += tally.itemset.categories[i];
        for (const auto& [len, v] : tally.itemset.by_length)
            for (std::size_t i = 0; i < 3; ++i) is.by_length[len][i] += v[i];
    }
    return out;
}

std::vector<std::string> Aggregate::conditions() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : cells)
        if (std::find(out.begin(), out.end(), key.first) == out.end()) out.push_back(key.first);
    return out;
}

std::vector<std::string> Aggregate::models() const {
    std::set<std::string> out;
    for (const auto& [key, _] : cells) out.insert(key.second);
    return {out.begin(), out.end()};
}

Aggregate aggregate(const std::vector<ScoredTrial>& trials) {
    Aggregate agg;
    for (const auto& t : trials) {
        if (agg.experiment.empty())
            agg.experiment = t.record.experiment;
        else if (agg.experiment != t.record.experiment)
            throw MixedAggregation(agg.experiment, t.record.experiment);

        auto& cell = agg.cells[{t.condition, t.record.model}];
        ++cell.trials;
        if (t.record.status == gateway::Status::TransportError) ++cell.transport_errors;
        if (t.record.status == gateway::Status::Refusal) ++cell.refusals;
        if (t.verdict) {
            switch (t.verdict->choice) {
                case Choice::NonConjunction: ++cell.linda.non_conjunction; break;
                case Choice::Conjunction: ++cell.linda.conjunction; break;
                case Choice::Neither: ++cell.linda.neither; break;
            }
            if (t.verdict->ambiguous) agg.audit.push_back(t.record.key());
        }
        if (t.score) {
            auto& is = cell.itemset;
            ++is.runs;
            is.found += t.score->found;
            is.not_found += t.score->not_found;
            is.hallucinations += t.score->fp;
            if (t.score->empty_output) ++is.empty_outputs;
            ++is.categories[static_cast<std::size_t>(t.score->category)];
            if (t.length) {
                auto& row = is.by_length[*t.length];
                row[0] += t.score->found;
                row[1] += t.score->not_found;
                row[2] += t.score->fp;
            }
        }
    }
    std::sort(agg.audit.begin(), agg.audit.end());
    return agg;
}

}  // namespace hashprompt::judge
