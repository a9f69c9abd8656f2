#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hashprompt/error.hpp"
#include "hashprompt/runner.hpp"

namespace hashprompt::runner {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kNoPreamble = "+no-preamble";

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

void require_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
        auto key = kv.first.as<std::string>();
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const YAML::Node& node, const char* key, const std::string& where) {
    try {
        return node[key].as<T>();
    } catch (const YAML::Exception& ex) {
        throw ConfigError(where + "." + key + ": " + ex.what());
    }
}

gateway::ProviderConfig parse_provider(const std::string& name, const YAML::Node& node) {
    const std::string where = "providers." + name;
    require_keys(node,
                 {"preset", "endpoint", "model", "api_key_env", "temperature", "top_p", "max_tokens", "seed",
                  "requests_per_minute"},
                 where);
    gateway::ProviderConfig p;
    if (node["preset"]) {
        auto preset = get<std::string>(node, "preset", where);
        if (preset == "llama2")
            p = gateway::llama2_preset();
        else if (preset == "llama3")
            p = gateway::llama3_preset();
        else
            throw ConfigError(where + ".preset: unknown preset '" + preset + "'");
    }
    p.name = name;
    if (p.model.empty()) p.model = name;
    if (node["endpoint"]) p.endpoint = get<std::string>(node, "endpoint", where);
    if (node["model"]) p.model = get<std::string>(node, "model", where);
    if (node["api_key_env"]) p.api_key_env = get<std::string>(node, "api_key_env", where);
    if (node["temperature"]) p.sampling.temperature = get<double>(node, "temperature", where);
    if (node["top_p"]) p.sampling.top_p = get<double>(node, "top_p", where);
    if (node["max_tokens"]) p.sampling.max_tokens = get<int>(node, "max_tokens", where);
    if (node["seed"]) p.sampling.seed = get<std::int64_t>(node, "seed", where);
    if (node["requests_per_minute"]) p.requests_per_minute = get<double>(node, "requests_per_minute", where);
    return p;
}

void parse_providers(const YAML::Node& node, ExperimentPlan& plan) {
    if (!node.IsMap()) throw ConfigError("providers: expected a mapping");
    for (const auto& kv : node) {
        auto name = kv.first.as<std::string>();
        plan.providers[name] = parse_provider(name, kv.second);
    }
}

Pairing parse_pairing(const YAML::Node& node, std::size_t index) {
    const std::string where = "pairings[" + std::to_string(index) + "]";
    require_keys(node, {"name", "a", "b"}, where);
    Pairing p;
    p.a = parse_selector(get<std::string>(node, "a", where));
    p.b = parse_selector(get<std::string>(node, "b", where));
    p.name = node["name"] ? get<std::string>(node, "name", where) : p.a.to_string() + " vs " + p.b.to_string();
    return p;
}

}  // namespace

std::string format_variant(const Variant& v) {
    std::string out = prompts::template_path(v.ref);
    if (v.ref.experiment == prompts::Experiment::Itemset) out += "@" + std::to_string(v.length);
    if (!v.preamble) out += kNoPreamble;
    return out;
}

Variant parse_variant(std::string_view text) {
    Variant v;
    if (text.ends_with(kNoPreamble)) {
        v.preamble = false;
        text.remove_suffix(kNoPreamble.size());
    }
    auto at = text.find('@');
    v.ref = prompts::parse_template_path(text.substr(0, at));
    if (v.ref.experiment == prompts::Experiment::Itemset) {
        if (at == std::string_view::npos) throw UnknownVariant(std::string(text) + " (itemset variants need @length)");
        int length = 0;
        std::string digits(text.substr(at + 1));
        try {
            std::size_t used = 0;
            length = std::stoi(digits, &used);
            if (used != digits.size()) throw UnknownVariant(std::string(text));
        } catch (const std::logic_error&) {
            throw UnknownVariant(std::string(text));
        }
        if (length < 1 || length > 5) throw InvalidLength(length);
        v.length = length;
    } else if (at != std::string_view::npos) {
        throw UnknownVariant(std::string(text));
    }
    return v;
}

std::string Selector::to_string() const {
    std::string out;
    if (!experiment.empty()) out += experiment + ":";
    out += template_path;
    if (!model.empty()) out += "@" + model;
    return out;
}

Selector parse_selector(std::string_view text) {
    Selector s;
    auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        s.experiment = std::string(text.substr(0, colon));
        text.remove_prefix(colon + 1);
    }
    auto at = text.find('@');
    s.template_path = std::string(text.substr(0, at));
    if (at != std::string_view::npos) s.model = std::string(text.substr(at + 1));
    prompts::parse_template_path(s.template_path);
    if (at != std::string_view::npos && s.model.empty()) throw ConfigError("selector '" + std::string(text) + "' has an empty model");
    return s;
}

void ExperimentPlan::validate() const {
    if (id.empty()) throw ConfigError("plan id is empty");
    if (workers < 1) throw ConfigError("plan " + id + ": workers must be >= 1");
    for (const auto& [_, p] : providers) p.validate();
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& t : trials) {
        const std::string where = "plan " + id + ", trial " + t.template_path + " / " + t.model;
        if (t.model.empty()) throw ConfigError(where + ": model is empty");
        if (t.iterations < 1) throw ConfigError(where + ": iterations must be positive");
        auto ref = prompts::parse_template_path(t.template_path);
        if (ref.experiment == prompts::Experiment::Itemset) {
            if (t.lengths.empty()) throw ConfigError(where + ": itemset trials need lengths");
            for (int len : t.lengths)
                if (len < 1 || len > 5) throw InvalidLength(len);
        } else if (!t.lengths.empty()) {
            throw ConfigError(where + ": lengths only apply to itemset templates");
        }
        if (!seen.insert({t.template_path, t.model}).second)
            throw ConfigError(where + ": listed twice");
    }
    if (mode != gateway::Mode::Live && !trials.empty() && cassette.empty())
        throw ConfigError("plan " + id + ": " + std::string(gateway::to_string(mode)) + " mode needs a cassette");
    for (const auto& r : references)
        if (r.plan.empty() == r.scored.empty())
            throw ConfigError("plan " + id + ": each reference needs exactly one of plan or scored");
}

ExperimentPlan parse_plan(std::string_view yaml_text, const std::string& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& ex) {
        throw ConfigError(std::string("plan: ") + ex.what());
    }
    if (root.IsNull()) throw ConfigError("plan is empty");
    require_keys(root,
                 {"id", "description", "mode", "cassette", "workers", "providers", "providers_file", "trials",
                  "pairings", "references", "output_dir"},
                 "plan");

    ExperimentPlan plan;
    plan.id = get<std::string>(root, "id", "plan");
    if (root["description"]) plan.description = get<std::string>(root, "description", "plan");
    if (root["mode"]) plan.mode = gateway::parse_mode(get<std::string>(root, "mode", "plan"));
    if (root["cassette"]) plan.cassette = resolve(base_dir, get<std::string>(root, "cassette", "plan"));
    if (root["workers"]) {
        auto w = get<long>(root, "workers", "plan");
        if (w < 1) throw ConfigError("plan.workers must be >= 1");
        plan.workers = static_cast<std::size_t>(w);
    }
    if (root["output_dir"]) plan.output_dir = get<std::string>(root, "output_dir", "plan");
    if (root["providers_file"]) {
        auto path = resolve(base_dir, get<std::string>(root, "providers_file", "plan"));
        try {
            parse_providers(YAML::LoadFile(path), plan);
        } catch (const YAML::Exception& ex) {
            throw ConfigError(path + ": " + ex.what());
        }
    }
    if (root["providers"]) parse_providers(root["providers"], plan);

    if (const auto trials = root["trials"]) {
        if (!trials.IsSequence()) throw ConfigError("plan.trials: expected a list");
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto& node = trials[i];
            const std::string where = "trials[" + std::to_string(i) + "]";
            require_keys(node, {"template", "model", "models", "iterations", "lengths", "preamble"}, where);
            TrialSpec base;
            base.template_path = get<std::string>(node, "template", where);
            if (node["iterations"]) {
                auto iterations = get<long>(node, "iterations", where);
                if (iterations < 1) throw ConfigError(where + ".iterations must be positive");
                base.iterations = static_cast<std::size_t>(iterations);
            }
            if (node["lengths"]) base.lengths = get<std::vector<int>>(node, "lengths", where);
            if (node["preamble"]) base.preamble = get<bool>(node, "preamble", where);
            std::vector<std::string> models;
            if (node["model"]) models.push_back(get<std::string>(node, "model", where));
            if (node["models"]) {
                auto more = get<std::vector<std::string>>(node, "models", where);
                models.insert(models.end(), more.begin(), more.end());
            }
            if (models.empty()) throw ConfigError(where + ": no model given");
            for (auto& m : models) {
                TrialSpec t = base;
                t.model = std::move(m);
                plan.trials.push_back(std::move(t));
            }
        }
    }

    if (const auto pairings = root["pairings"]) {
        if (!pairings.IsSequence()) throw ConfigError("plan.pairings: expected a list");
        for (std::size_t i = 0; i < pairings.size(); ++i) plan.pairings.push_back(parse_pairing(pairings[i], i));
    }

    if (const auto refs = root["references"]) {
        if (!refs.IsSequence()) throw ConfigError("plan.references: expected a list");
        for (std::size_t i = 0; i < refs.size(); ++i) {
            const std::string where = "references[" + std::to_string(i) + "]";
            require_keys(refs[i], {"plan", "scored"}, where);
            Reference r;
            if (refs[i]["plan"]) r.plan = resolve(base_dir, get<std::string>(refs[i], "plan", where));
            if (refs[i]["scored"]) r.scored = resolve(base_dir, get<std::string>(refs[i], "scored", where));
            plan.references.push_back(std::move(r));
        }
    }

    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read plan " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto dir = fs::path(path).parent_path().string();
    return parse_plan(buf.str(), dir.empty() ? "." : dir);
}

std::vector<PlannedTrial> expand(const ExperimentPlan& plan) {
    std::vector<PlannedTrial> out;
    for (const auto& t : plan.trials) {
        Variant v;
        v.ref = prompts::parse_template_path(t.template_path);
        v.preamble = t.preamble;
        std::vector<int> lengths = t.lengths.empty() ? std::vector<int>{0} : t.lengths;
        for (int len : lengths) {
            v.length = len;
            auto rendered = prompts::render(v.ref, v.preamble, len == 0 ? 1 : len);
            for (std::size_t i = 0; i < t.iterations; ++i) out.push_back({v, t.model, i, rendered});
        }
    }
    return out;
}

}  // namespace hashprompt::runner
