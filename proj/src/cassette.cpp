#include <ctime>
#include <filesystem>
#include <fstream>

#include "hashprompt/error.hpp"
#include "hashprompt/gateway.hpp"

namespace hashprompt::gateway {

using nlohmann::json;

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Ok: return "ok";
        case Status::Refusal: return "refusal";
        case Status::TransportError: return "transport-error";
    }
    return "?";
}

Status parse_status(std::string_view s) {
    if (s == "ok") return Status::Ok;
    if (s == "refusal") return Status::Refusal;
    if (s == "transport-error") return Status::TransportError;
    throw ConfigError("unknown status '" + std::string(s) + "'");
}

std::string TrialKey::to_string() const {
    return experiment + "/" + variant + "/" + model + "/" + std::to_string(iteration) + "/" + digest;
}

TrialKey TrialRecord::key() const { return {experiment, variant, model, iteration, prompt_digest(prompt)}; }

json to_json(const TrialRecord& r) {
    return {
        {"experiment", r.experiment}, {"variant", r.variant},     {"iteration", r.iteration},
        {"model", r.model},           {"prompt", r.prompt},       {"response", r.response},
        {"timestamp", r.timestamp},   {"status", to_string(r.status)},
    };
}

TrialRecord trial_from_json(const json& j) {
    TrialRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    r.iteration = j.at("iteration").get<std::size_t>();
    r.model = j.at("model").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.timestamp = j.value("timestamp", "");
    r.status = parse_status(j.at("status").get<std::string>());
    return r;
}

json to_json(const CassetteEntry& e) {
    return {
        {"key",
         {{"experiment", e.key.experiment},
          {"variant", e.key.variant},
          {"model", e.key.model},
          {"iteration", e.key.iteration},
          {"digest", e.key.digest}}},
        {"prompt", e.prompt},
        {"response", e.response},
        {"status", to_string(e.status)},
        {"timestamp", e.timestamp},
    };
}

CassetteEntry cassette_entry_from_json(const json& j) {
    CassetteEntry e;
    const auto& k = j.at("key");
    e.key.experiment = k.at("experiment").get<std::string>();
    e.key.variant = k.at("variant").get<std::string>();
    e.key.model = k.at("model").get<std::string>();
    e.key.iteration = k.at("iteration").get<std::size_t>();
    e.key.digest = k.at("digest").get<std::string>();
    e.prompt = j.at("prompt").get<std::string>();
    e.response = j.at("response").get<std::string>();
    e.status = parse_status(j.at("status").get<std::string>());
    e.timestamp = j.value("timestamp", "");
    return e;
}

Cassette::Cassette(std::string path) : path_(std::move(path)) {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    if (!in) throw ConfigError("cannot read cassette " + path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto entry = cassette_entry_from_json(json::parse(line));
            auto key = entry.key;
            entries_.insert_or_assign(std::move(key), std::move(entry));
        } catch (const json::exception& ex) {
            throw ConfigError(path_ + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
}

Cassette Cassette::load(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("cassette " + path + " does not exist");
    return Cassette(path);
}

std::optional<CassetteEntry> Cassette::find(const TrialKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void Cassette::append(CassetteEntry entry) {
    std::lock_guard lock(mutex_);
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) throw Error("cannot append to cassette " + path_);
        out << to_json(entry).dump() << '\n';
    }
    auto key = entry.key;
    entries_.insert_or_assign(std::move(key), std::move(entry));
}

std::size_t Cassette::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace hashprompt::gateway
