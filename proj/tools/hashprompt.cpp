// Command-line front end: rendering, hashing, mining, experiment runs and statistics.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "hashprompt/corpus.hpp"
#include "hashprompt/error.hpp"
#include "hashprompt/hasher.hpp"
#include "hashprompt/miner.hpp"
#include "hashprompt/prompts.hpp"
#include "hashprompt/runner.hpp"
#include "hashprompt/stats.hpp"

namespace hp = hashprompt;

namespace {

std::string slurp(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hp::ConfigError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw hp::Error("cannot write " + out);
    f << text;
}

const hp::corpus::TransactionTable& builtin_table(const std::string& name) {
    const auto& d = hp::corpus::builtin_datasets();
    if (name == "correct") return d.csv_correct;
    if (name == "wrong") return d.csv_wrong;
    if (name == "hashed") return d.csv_hashed;
    throw hp::ConfigError("unknown dataset '" + name + "' (correct, wrong, hashed)");
}

hp::corpus::TransactionTable load_table(const std::string& path, const std::string& dataset) {
    if (!dataset.empty()) return builtin_table(dataset);
    if (path.empty()) throw hp::ConfigError("give --table or --dataset");
    return hp::corpus::parse_table(slurp(path));
}

hp::hasher::HashingScheme load_scheme(const std::string& name) {
    if (name == "linda") return hp::hasher::linda_scheme();
    if (name == "tabular") return hp::hasher::tabular_linda_scheme();
    return hp::hasher::parse_scheme(slurp(name));
}

void print_battery(const hp::stats::TestBattery& b) {
    const auto& t = b.table;
    std::cout << "table: [[" << t.a << ", " << t.b << "], [" << t.c << ", " << t.d << "]]\n";
    if (b.degenerate) {
        std::cout << "chi2: degenerate (zero margin)\n";
    } else {
        std::cout << "chi2: " << hp::stats::format_sig(b.chi_square->chi2) << '\n';
        std::cout << "p: " << hp::stats::format_sig(b.chi_square->p) << '\n';
    }
    std::cout << "fisher_p: " << hp::stats::format_sig(b.fisher_p) << '\n';
    if (b.effect) {
        std::cout << "cramers_v: " << hp::stats::format_sig(b.effect->cramers_v) << '\n';
        std::cout << "interpretation: " << hp::stats::to_string(b.effect->interpretation) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hashing prompts and the experiment harness around them"};
    app.require_subcommand(1);

    // render
    auto* render = app.add_subcommand("render", "Print a prompt template");
    std::string variant;
    int length = 1;
    bool no_preamble = false, list = false;
    render->add_option("variant", variant, "Template path or variant, e.g. itemset/correct@3");
    render->add_option("--length", length, "Itemset length (1..5)");
    render->add_flag("--no-preamble", no_preamble, "Drop the role-play clause");
    render->add_flag("--list", list, "List template paths");

    // hash
    auto* hash = app.add_subcommand("hash", "Hash, dehash or mask text with a scheme");
    std::string scheme_name = "linda", text_path = "-", text_arg, out;
    bool dehash = false, mask = false;
    hash->add_option("--scheme", scheme_name, "linda, tabular or a scheme file");
    hash->add_option("--input", text_path, "Input file, '-' for stdin");
    hash->add_option("--text", text_arg, "Literal input text");
    hash->add_flag("--dehash", dehash, "Replace identifiers by their surfaces");
    hash->add_flag("--mask", mask, "Replace surfaces by a dash");
    hash->add_option("--out", out, "Output file");

    // derive
    auto* derive = app.add_subcommand("derive", "Apply a value bijection to a table");
    std::string table_path, dataset, bijection_path, scope = "cells";
    derive->add_option("--table", table_path, "CSV file");
    derive->add_option("--dataset", dataset, "Built-in dataset: correct, wrong, hashed");
    derive->add_option("--bijection", bijection_path, "Mapping file ('source => target' lines)");
    derive->add_option("--scope", scope, "cells or cells-and-header")->check(CLI::IsMember({"cells", "cells-and-header"}));
    derive->add_option("--out", out, "Output file");

    // mine
    auto* mine = app.add_subcommand("mine", "Frequent itemsets of a table");
    std::size_t support = 2;
    std::vector<std::size_t> lengths;
    bool brute = false;
    mine->add_option("--table", table_path, "CSV file");
    mine->add_option("--dataset", dataset, "Built-in dataset: correct, wrong, hashed");
    mine->add_option("--support", support, "Absolute minimum support");
    mine->add_option("--length", lengths, "Itemset lengths (default 1..columns)");
    mine->add_flag("--brute-force", brute, "Use exhaustive enumeration");

    // run
    auto* run = app.add_subcommand("run", "Execute an experiment plan");
    std::string config, cassette, out_dir;
    bool live = false;
    std::size_t workers = 0;
    run->add_option("--config", config, "Plan file")->required();
    run->add_option("--cassette", cassette, "Cassette overriding the plan's");
    run->add_flag("--live", live, "Allow network calls (live or record mode)");
    run->add_option("--out", out_dir, "Output directory (default: report to stdout)");
    run->add_option("--workers", workers, "Concurrent trials");

    // score
    auto* score = app.add_subcommand("score", "Judge raw trial records");
    std::string records_path;
    score->add_option("--records", records_path, "Trial-record JSON lines")->required();
    score->add_option("--out", out, "Scored-trial output (default stdout)");

    // stats
    auto* stat = app.add_subcommand("stats", "Chi-square, Fisher and Cramér's V for a 2x2 table");
    std::vector<std::uint64_t> cells;
    std::string scored_path, pair_a, pair_b;
    stat->add_option("cells", cells, "a b c d")->expected(0, 4);
    stat->add_option("--scored", scored_path, "Scored-trial file");
    stat->add_option("--a", pair_a, "Selector for row A: template[@model]");
    stat->add_option("--b", pair_b, "Selector for row B: template[@model]");

    // report
    auto* report = app.add_subcommand("report", "Report from a scored-trial file");
    std::string format = "markdown";
    report->add_option("--scored", scored_path, "Scored-trial file")->required();
    report->add_option("--config", config, "Plan whose pairings and order to use");
    report->add_option("--format", format, "markdown or json")->check(CLI::IsMember({"markdown", "json"}));
    report->add_option("--out", out, "Output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render) {
            if (list) {
                for (const auto& p : hp::prompts::template_paths()) std::cout << p << '\n';
                return 0;
            }
            if (variant.empty()) throw hp::ConfigError("render needs a template path");
            hp::runner::Variant v;
            if (variant.find('@') != std::string::npos || variant.ends_with("+no-preamble")) {
                v = hp::runner::parse_variant(variant);
            } else {
                v.ref = hp::prompts::parse_template_path(variant);
                v.length = length;
            }
            if (no_preamble) v.preamble = false;
            std::cout << hp::prompts::render(v.ref, v.preamble, v.length == 0 ? 1 : v.length).text << '\n';
            return 0;
        }
        if (*hash) {
            const auto scheme = load_scheme(scheme_name);
            const std::string text = hash->count("--text") ? text_arg : slurp(text_path);
            std::string result = dehash ? hp::hasher::dehash_text(text, scheme)
                                 : mask ? hp::hasher::mask_text(text, scheme)
                                        : hp::hasher::hash_text(text, scheme);
            emit(result + (result.ends_with('\n') ? "" : "\n"), out);
            return 0;
        }
        if (*derive) {
            auto table = load_table(table_path, dataset);
            if (bijection_path.empty()) throw hp::ConfigError("derive needs --bijection");
            auto s = scope == "cells" ? hp::corpus::BijectionScope::CellsOnly : hp::corpus::BijectionScope::CellsAndHeader;
            auto bijection = hp::corpus::parse_bijection(slurp(bijection_path), s);
            emit(hp::corpus::format_table(hp::corpus::apply_bijection(table, bijection)), out);
            return 0;
        }
        if (*mine) {
            auto table = load_table(table_path, dataset);
            if (lengths.empty())
                for (std::size_t l = 1; l <= table.columns(); ++l) lengths.push_back(l);
            for (auto l : lengths) {
                hp::miner::MiningTask task{support, l};
                auto sets = brute ? hp::miner::brute_force(table, task) : hp::miner::apriori(table, task);
                std::cout << "length " << l << ": " << sets.size() << " itemsets\n";
                for (const auto& s : sets) std::cout << "  " << hp::miner::format_itemset(s.items) << "  support " << s.support << '\n';
            }
            return 0;
        }
        if (*run) {
            auto plan = hp::runner::load_plan(config);
            hp::runner::RunOptions opts;
            if (!cassette.empty()) opts.cassette = cassette;
            opts.live = live;
            if (workers > 0) opts.workers = workers;
            auto result = hp::runner::run_plan(plan, opts);
            const std::string dir = out_dir.empty() ? plan.output_dir : out_dir;
            if (dir.empty()) {
                std::cout << hp::runner::render_markdown(result);
            } else {
                hp::runner::write_outputs(result, dir);
                std::cerr << "wrote " << dir << "/" << plan.id << ".{scored.jsonl,report.md,report.json}\n";
            }
            if (result.any_errors()) {
                std::cerr << result.transport_errors << " trial(s) ended in transport errors\n";
                return 2;
            }
            return 0;
        }
        if (*score) {
            std::ostringstream buf;
            bool errors = false;
            for (const auto& r : hp::runner::read_records(records_path)) {
                buf << hp::judge::to_json(hp::runner::score_record(r)).dump() << '\n';
                errors = errors || r.status == hp::gateway::Status::TransportError;
            }
            emit(buf.str(), out);
            return errors ? 2 : 0;
        }
        if (*stat) {
            hp::stats::ContingencyTable2x2 t;
            if (!scored_path.empty()) {
                if (pair_a.empty() || pair_b.empty()) throw hp::ConfigError("--scored needs --a and --b");
                auto agg = hp::judge::aggregate(hp::runner::read_scored(scored_path));
                hp::runner::Pairing p{"cli", hp::runner::parse_selector(pair_a), hp::runner::parse_selector(pair_b)};
                auto results = hp::runner::evaluate_pairings({p}, agg, {});
                if (!results[0].error.empty()) throw hp::ConfigError(results[0].error);
                print_battery(results[0].battery);
                return 0;
            }
            if (cells.size() != 4) throw hp::ConfigError("stats needs four cell counts a b c d");
            t = {cells[0], cells[1], cells[2], cells[3]};
            if (t.n() == 0) throw hp::ConfigError("table is empty");
            print_battery(hp::stats::run_battery(t));
            return 0;
        }
        if (*report) {
            hp::runner::RunResult result;
            if (!config.empty()) result.plan = hp::runner::load_plan(config);
            result.trials = hp::runner::read_scored(scored_path);
            result.aggregate = hp::judge::aggregate(result.trials);
            if (result.plan.id.empty()) result.plan.id = result.aggregate.experiment;
            for (const auto& t : result.trials)
                if (t.record.status == hp::gateway::Status::TransportError) ++result.transport_errors;
            std::map<std::string, hp::judge::Aggregate> refs;
            result.pairings = hp::runner::evaluate_pairings(result.plan.pairings, result.aggregate, refs);
            emit(format == "json" ? hp::runner::render_json(result).dump(2) + "\n" : hp::runner::render_markdown(result),
                 out);
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
