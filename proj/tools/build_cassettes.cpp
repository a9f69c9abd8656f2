// Regenerates the bundled replay cassettes from the archived tallies.
//
//   build_cassettes --configs configs --out data/cassettes

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hashprompt/error.hpp"
#include "hashprompt/fixtures.hpp"
#include "hashprompt/runner.hpp"

namespace fs = std::filesystem;
namespace hp = hashprompt;

int main(int argc, char** argv) {
    CLI::App app{"Build replay cassettes"};
    std::string configs = "configs", out = "data/cassettes";
    app.add_option("--configs", configs, "Directory holding the bundled plans");
    app.add_option("--out", out, "Cassette directory");
    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out);
        auto write = [&](const std::string& name, const std::string& text) {
            std::ofstream f(fs::path(out) / name, std::ios::binary);
            if (!f) throw hp::Error("cannot write " + name);
            f << text;
            std::cerr << "wrote " << (fs::path(out) / name).string() << '\n';
        };
        for (const char* id : {"exp1", "exp2", "exp3", "exp4-free-text", "exp4-itemset", "exp4-tabular"}) {
            auto plan = hp::runner::load_plan((fs::path(configs) / (std::string(id) + ".yaml")).string());
            auto entries = hp::fixtures::synthesize_cassette(plan, hp::fixtures::published_responder(plan));
            write(std::string(id) + ".jsonl", hp::fixtures::serialize_cassette(entries));
        }
        auto exp2 = hp::runner::load_plan((fs::path(configs) / "exp2.yaml").string());
        write("exp2-perfect.jsonl",
              hp::fixtures::serialize_cassette(hp::fixtures::synthesize_cassette(exp2, hp::fixtures::perfect_responder())));
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
