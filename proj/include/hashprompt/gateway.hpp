#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hashprompt::gateway {

struct Sampling {
    double temperature = 1.0;
    std::optional<double> top_p;
    int max_tokens = 1024;
    std::optional<std::int64_t> seed;

    bool operator==(const Sampling&) const = default;
};

struct ProviderConfig {
    std::string name;      ///< label used in plans and reports
    std::string endpoint;  ///< full chat-completions URL
    std::string model;     ///< model identifier sent on the wire and stored in records
    std::string api_key_env;
    Sampling sampling;
    double requests_per_minute = 0;  ///< 0 disables limiting

    /// Throws ConfigError on temperature < 0 or max_tokens < 1.
    void validate() const;
};

/// Presets matching the published sampling settings.
ProviderConfig llama2_preset();  ///< max_tokens 1024, temperature 0.1, top_p 0.6, seed 42
ProviderConfig llama3_preset();  ///< temperature 0.2, top_p 0.7, max_tokens 1024

enum class Status { Ok, Refusal, TransportError };

std::string_view to_string(Status s);
Status parse_status(std::string_view s);

/// SHA-256 of the prompt bytes, lowercase hex.
std::string prompt_digest(std::string_view prompt);

/// Identity of one model call. Identical prompts are told apart by iteration.
struct TrialKey {
    std::string experiment;
    std::string variant;
    std::string model;
    std::size_t iteration = 0;
    std::string digest;

    auto operator<=>(const TrialKey&) const = default;
    std::string to_string() const;
};

struct TrialRecord {
    std::string experiment;
    std::string variant;
    std::size_t iteration = 0;
    std::string prompt;
    std::string response;
    std::string model;
    std::string timestamp;
    Status status = Status::Ok;

    TrialKey key() const;
    bool operator==(const TrialRecord&) const = default;
};

nlohmann::json to_json(const TrialRecord& r);
TrialRecord trial_from_json(const nlohmann::json& j);

struct CassetteEntry {
    TrialKey key;
    std::string prompt;
    std::string response;
    Status status = Status::Ok;
    std::string timestamp;
};

nlohmann::json to_json(const CassetteEntry& e);
CassetteEntry cassette_entry_from_json(const nlohmann::json& j);

/// Append-only JSON-lines store of recorded calls. Later lines win on duplicate keys.
/// Appends are serialized; lookups are safe concurrently with appends.
class Cassette {
public:
    Cassette() = default;
    /// Loads `path` if it exists; appends go to the same file.
    explicit Cassette(std::string path);

    static Cassette load(const std::string& path);

    std::optional<CassetteEntry> find(const TrialKey& key) const;
    void append(CassetteEntry entry);
    std::size_t size() const;
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    mutable std::mutex mutex_;
    std::map<TrialKey, CassetteEntry> entries_;
};

/// At most `limit` acquisitions in any sliding window of `window`.
class RateLimiter {
public:
    RateLimiter(std::size_t limit, std::chrono::steady_clock::duration window);
    void acquire();

private:
    std::size_t limit_;
    std::chrono::steady_clock::duration window_;
    std::mutex mutex_;
    std::deque<std::chrono::steady_clock::time_point> stamps_;
};

/// What an adapter saw on the wire.
struct WireResult {
    Status status = Status::Ok;
    std::string text;   ///< assistant content, or the error description
    std::string detail;
};

/// One single-turn chat-completion exchange. Implementations must not keep history.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual WireResult send(const ProviderConfig& provider, std::string_view prompt) = 0;
};

/// Request body with exactly one user message and the provider's sampling fields.
nlohmann::json build_request(const ProviderConfig& provider, std::string_view prompt);

/// Maps an HTTP status and body to a wire result. 200 with empty content, a
/// refusal field, or a content-filter stop is a refusal; other failures are transport errors.
WireResult interpret_response(int http_status, std::string_view body);

/// OpenAI-compatible HTTP(S) adapter. The API key is read from the environment
/// variable named by ProviderConfig::api_key_env at call time.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(std::chrono::seconds timeout = std::chrono::seconds(120));
    WireResult send(const ProviderConfig& provider, std::string_view prompt) override;

private:
    std::chrono::seconds timeout_;
};

enum class Mode { Live, Record, Replay };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
};

struct Completion {
    Status status = Status::Ok;
    std::string text;
    std::string timestamp;
};

/// Routes calls to a backend or a cassette according to the mode.
class Gateway {
public:
    /// `backend` may be null in replay mode; `cassette` may be null in live mode.
    Gateway(Mode mode, std::shared_ptr<ChatBackend> backend, std::shared_ptr<Cassette> cassette,
            RetryPolicy retry = {});

    /// Never throws for provider-side failures: refusals and exhausted retries come
    /// back as statuses. Throws CassetteMiss in replay mode.
    Completion call(const TrialKey& key, const ProviderConfig& provider, std::string_view prompt);

    /// Plain form: returns the response text, throws TransportError, Refusal or CassetteMiss.
    std::string complete(const ProviderConfig& provider, std::string_view prompt);

    Mode mode() const noexcept { return mode_; }

private:
    RateLimiter* limiter_for(const ProviderConfig& provider);

    Mode mode_;
    std::shared_ptr<ChatBackend> backend_;
    std::shared_ptr<Cassette> cassette_;
    RetryPolicy retry_;
    std::mutex limiter_mutex_;
    std::map<std::string, std::unique_ptr<RateLimiter>> limiters_;
    std::mutex counter_mutex_;
    std::map<std::string, std::size_t> plain_calls_;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace hashprompt::gateway
