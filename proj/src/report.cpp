#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hashprompt/error.hpp"
#include "hashprompt/runner.hpp"

namespace hashprompt::runner {

using nlohmann::json;

namespace {

std::string label_for(const std::string& path) {
    static const std::map<std::string, std::string> labels{
        {"linda-free-text/original", "Original prompt"},
        {"linda-free-text/hashed-with-desc", "Hashed prompt with added description"},
        {"linda-free-text/hashed-without-desc", "Hashed prompt without added description"},
        {"linda-free-text/validation", "Validation prompt"},
        {"itemset/correct", "CSV-Correct"},
        {"itemset/wrong", "CSV-Wrong"},
        {"itemset/hashed", "CSV-Hashed"},
        {"linda-tabular/not-hashed", "Not hashed"},
        {"linda-tabular/hashed-without-rel", "Hashed without relationships"},
        {"linda-tabular/hashed-with-rel", "Hashed with relationships"},
    };
    auto it = labels.find(path);
    return it == labels.end() ? path : it->second;
}

bool is_itemset(const std::string& path) {
    return prompts::parse_template_path(path).experiment == prompts::Experiment::Itemset;
}

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

struct Layout {
    std::vector<std::string> linda_conditions;
    std::vector<std::string> itemset_conditions;
    std::vector<std::string> models;
};

Layout layout_of(const RunResult& r) {
    Layout l;
    for (const auto& t : r.plan.trials) {
        push_unique(is_itemset(t.template_path) ? l.itemset_conditions : l.linda_conditions, t.template_path);
        push_unique(l.models, t.model);
    }
    // Trials loaded from a file may carry conditions the plan does not list.
    for (const auto& t : r.trials) {
        push_unique(is_itemset(t.condition) ? l.itemset_conditions : l.linda_conditions, t.condition);
        push_unique(l.models, t.record.model);
    }
    return l;
}

void row(std::ostringstream& out, const std::vector<std::string>& cells) {
    out << '|';
    for (const auto& c : cells) out << ' ' << c << " |";
    out << '\n';
}

void header(std::ostringstream& out, const std::vector<std::string>& cells) {
    row(out, cells);
    out << '|';
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i == 0 ? "---|" : "---:|");
    out << '\n';
}

std::string n(std::size_t x) { return std::to_string(x); }

std::string strip_period(std::string s) {
    while (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

const judge::ConditionTally* cell(const judge::Aggregate& agg, const std::string& condition, const std::string& model) {
    auto it = agg.cells.find({condition, model});
    return it == agg.cells.end() ? nullptr : &it->second;
}

void linda_section(std::ostringstream& out, const RunResult& r, const Layout& l) {
    const auto& agg = r.aggregate;
    for (const auto& condition : l.linda_conditions) {
        const auto key = std::get<prompts::LindaKey>(prompts::render(prompts::parse_template_path(condition)).answer_key);
        out << "## " << label_for(condition) << " (`" << condition << "`)\n\n";
        out << "Number of times each answer was chosen.\n\n";
        std::vector<std::string> h{"Answer"};
        std::vector<std::string> models;
        for (const auto& m : l.models)
            if (cell(agg, condition, m)) {
                h.push_back(m);
                models.push_back(m);
            }
        header(out, h);
        auto line = [&](const std::string& name, auto pick) {
            std::vector<std::string> cells{name};
            for (const auto& m : models) cells.push_back(n(pick(cell(agg, condition, m)->linda)));
            row(out, cells);
        };
        line(strip_period(key.options[0]), [](const judge::LindaTally& t) { return t.non_conjunction; });
        line(strip_period(key.options[1]), [](const judge::LindaTally& t) { return t.conjunction; });
        line("Neither", [](const judge::LindaTally& t) { return t.neither; });
        out << '\n';
    }

    out << "## Correct answers per model\n\n";
    std::vector<std::string> h{"Condition"};
    for (const auto& m : l.models) h.push_back(m);
    header(out, h);
    for (const auto& condition : l.linda_conditions) {
        std::vector<std::string> cells{label_for(condition)};
        for (const auto& m : l.models) {
            const auto* c = cell(agg, condition, m);
            cells.push_back(c ? n(c->linda.correct()) + "/" + n(c->linda.total()) : "-");
        }
        row(out, cells);
    }
    out << '\n';

    out << "## Summary over all models\n\n";
    out << "Correct answers are the option without conjunction; wrong answers are the conjunction or no answer.\n\n";
    h = {""};
    for (const auto& condition : l.linda_conditions) h.push_back(label_for(condition));
    header(out, h);
    std::vector<std::string> correct{"Correct answers"}, wrong{"Wrong answers"};
    for (const auto& condition : l.linda_conditions) {
        auto pooled = agg.pooled(condition);
        correct.push_back(n(pooled.linda.correct()));
        wrong.push_back(n(pooled.linda.wrong()));
    }
    row(out, correct);
    row(out, wrong);
    out << '\n';
}

void itemset_section(std::ostringstream& out, const RunResult& r, const Layout& l) {
    const auto& agg = r.aggregate;
    for (const auto& model : l.models) {
        std::vector<std::string> conditions;
        for (const auto& c : l.itemset_conditions)
            if (cell(agg, c, model)) conditions.push_back(c);
        if (conditions.empty()) continue;

        out << "## " << model << ": runs grouped by precision and recall\n\n";
        std::vector<std::string> h{"Result"};
        for (const auto& c : conditions) h.push_back(label_for(c));
        h.push_back("Σ");
        header(out, h);
        for (std::size_t k = 0; k < 4; ++k) {
            std::vector<std::string> cells{std::string(judge::label(static_cast<judge::Category>(k)))};
            std::size_t sum = 0;
            for (const auto& c : conditions) {
                auto x = cell(agg, c, model)->itemset.categories[k];
                sum += x;
                cells.push_back(n(x));
            }
            cells.push_back(n(sum));
            row(out, cells);
        }
        std::vector<std::string> total{"Σ"};
        std::size_t runs = 0;
        for (const auto& c : conditions) {
            runs += cell(agg, c, model)->itemset.runs;
            total.push_back(n(cell(agg, c, model)->itemset.runs));
        }
        total.push_back(n(runs));
        row(out, total);
        out << '\n';

        out << "## " << model << ": true itemsets found across all lengths\n\n";
        h = {"Itemsets"};
        for (const auto& c : conditions) h.push_back(label_for(c));
        header(out, h);
        std::vector<std::string> found{"Found"}, missed{"Not found"}, sum{"Σ"}, halluc{"Hallucinations"},
            empty{"Empty outputs"};
        for (const auto& c : conditions) {
            const auto& t = cell(agg, c, model)->itemset;
            found.push_back(n(t.found));
            missed.push_back(n(t.not_found));
            sum.push_back(n(t.found + t.not_found));
            halluc.push_back(n(t.hallucinations));
            empty.push_back(n(t.empty_outputs));
        }
        row(out, found);
        row(out, missed);
        row(out, sum);
        row(out, halluc);
        row(out, empty);
        out << '\n';

        out << "### " << model << ": per-length breakdown (extension)\n\n";
        out << "Summed over repetitions. Finer than the aggregate tables above.\n\n";
        header(out, {"Condition", "Length", "Found", "Not found", "Hallucinations"});
        for (const auto& c : conditions)
            for (const auto& [len, v] : cell(agg, c, model)->itemset.by_length)
                row(out, {label_for(c), n(len), n(v[0]), n(v[1]), n(v[2])});
        out << '\n';
    }
}

std::string side_counts(const stats::ContingencyTable2x2& t, bool first) {
    return first ? n(t.a) + " / " + n(t.b) : n(t.c) + " / " + n(t.d);
}

void pairing_section(std::ostringstream& out, const RunResult& r) {
    if (r.pairings.empty()) return;
    out << "## Statistical tests\n\n";
    out << "Chi-square with continuity correction (df = 1), two-sided Fisher exact test, Cramér's V.\n\n";
    header(out, {"Pairing", "A", "B", "A counts", "B counts", "χ²", "p", "Fisher p", "Cramér's V", "Effect"});
    for (const auto& p : r.pairings) {
        std::vector<std::string> cells{p.pairing.name, p.pairing.a.to_string(), p.pairing.b.to_string()};
        if (!p.error.empty()) {
            cells.insert(cells.end(), {"-", "-", "-", "-", "-", "-", "error: " + p.error});
            row(out, cells);
            continue;
        }
        const auto& b = p.battery;
        cells.push_back(side_counts(b.table, true));
        cells.push_back(side_counts(b.table, false));
        if (b.degenerate) {
            cells.insert(cells.end(), {"degenerate", "-", stats::format_sig(b.fisher_p), "-", "-"});
        } else {
            cells.push_back(stats::format_sig(b.chi_square->chi2));
            cells.push_back(stats::format_sig(b.chi_square->p));
            cells.push_back(stats::format_sig(b.fisher_p));
            cells.push_back(stats::format_sig(b.effect->cramers_v, 3));
            cells.emplace_back(stats::to_string(b.effect->interpretation));
        }
        row(out, cells);
    }
    out << '\n';
}

json tally_json(const judge::ConditionTally& t) {
    json by_length = json::object();
    for (const auto& [len, v] : t.itemset.by_length)
        by_length[std::to_string(len)] = {{"found", v[0]}, {"not_found", v[1]}, {"hallucinations", v[2]}};
    json categories = json::object();
    for (std::size_t k = 0; k < 4; ++k)
        categories[std::string(judge::to_string(static_cast<judge::Category>(k)))] = t.itemset.categories[k];
    return {
        {"trials", t.trials},
        {"transport_errors", t.transport_errors},
        {"refusals", t.refusals},
        {"linda",
         {{"non_conjunction", t.linda.non_conjunction},
          {"conjunction", t.linda.conjunction},
          {"neither", t.linda.neither},
          {"correct", t.linda.correct()},
          {"wrong", t.linda.wrong()}}},
        {"itemset",
         {{"runs", t.itemset.runs},
          {"found", t.itemset.found},
          {"not_found", t.itemset.not_found},
          {"hallucinations", t.itemset.hallucinations},
          {"empty_outputs", t.itemset.empty_outputs},
          {"categories", categories},
          {"by_length", by_length}}},
    };
}

}  // namespace

std::string render_markdown(const RunResult& r) {
    std::ostringstream out;
    const auto l = layout_of(r);
    std::size_t refusals = 0;
    for (const auto& [_, c] : r.aggregate.cells) refusals += c.refusals;

    out << "# " << r.plan.id << "\n\n";
    if (!r.plan.description.empty()) out << r.plan.description << "\n\n";
    out << "- Mode: " << gateway::to_string(r.mode) << '\n';
    out << "- Trials: " << r.trials.size() << '\n';
    out << "- Transport errors: " << r.transport_errors << '\n';
    out << "- Refusals: " << refusals << '\n';
    out << "- Status: " << (r.any_errors() ? "INCOMPLETE (some trials failed)" : "complete") << "\n\n";

    if (r.trials.empty()) {
        out << "No trials were planned.\n";
        return out.str();
    }
    if (!l.linda_conditions.empty()) linda_section(out, r, l);
    if (!l.itemset_conditions.empty()) itemset_section(out, r, l);
    pairing_section(out, r);

    if (!r.aggregate.audit.empty()) {
        out << "## Ambiguous answers for manual review\n\n";
        for (const auto& k : r.aggregate.audit) out << "- `" << k.to_string() << "`\n";
        out << '\n';
    }
    return out.str();
}

json render_json(const RunResult& r) {
    json cells = json::array();
    for (const auto& [key, t] : r.aggregate.cells) {
        json c = tally_json(t);
        c["condition"] = key.first;
        c["model"] = key.second;
        cells.push_back(std::move(c));
    }
    json pairings = json::array();
    for (const auto& p : r.pairings) {
        json j = {{"name", p.pairing.name}, {"a", p.pairing.a.to_string()}, {"b", p.pairing.b.to_string()}};
        if (!p.error.empty()) {
            j["error"] = p.error;
        } else {
            const auto& b = p.battery;
            j["table"] = {{b.table.a, b.table.b}, {b.table.c, b.table.d}};
            j["degenerate"] = b.degenerate;
            j["fisher_p"] = b.fisher_p;
            if (b.chi_square) {
                j["chi2"] = b.chi_square->chi2;
                j["p"] = b.chi_square->p;
                j["cramers_v"] = b.effect->cramers_v;
                j["interpretation"] = stats::to_string(b.effect->interpretation);
            }
        }
        pairings.push_back(std::move(j));
    }
    json audit = json::array();
    for (const auto& k : r.aggregate.audit) audit.push_back(k.to_string());
    return {
        {"id", r.plan.id},
        {"mode", gateway::to_string(r.mode)},
        {"trials", r.trials.size()},
        {"transport_errors", r.transport_errors},
        {"cells", cells},
        {"pairings", pairings},
        {"audit", audit},
    };
}

void write_outputs(const RunResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto base = (std::filesystem::path(dir) / result.plan.id).string();
    write_scored(base + ".scored.jsonl", result.trials);
    std::ofstream md(base + ".report.md");
    if (!md) throw Error("cannot write " + base + ".report.md");
    md << render_markdown(result);
    std::ofstream js(base + ".report.json");
    if (!js) throw Error("cannot write " + base + ".report.json");
    js << render_json(result).dump(2) << '\n';
}

}  // namespace hashprompt::runner
