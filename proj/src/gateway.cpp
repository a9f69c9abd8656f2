#include "hashprompt/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hashprompt/error.hpp"

namespace hashprompt::gateway {

using nlohmann::json;

void ProviderConfig::validate() const {
    if (sampling.temperature < 0) throw ConfigError("provider " + name + ": temperature must be >= 0");
    if (sampling.max_tokens < 1) throw ConfigError("provider " + name + ": max_tokens must be >= 1");
    if (requests_per_minute < 0) throw ConfigError("provider " + name + ": negative rate limit");
}

ProviderConfig llama2_preset() {
    ProviderConfig p;
    p.name = "llama-2-70b";
    p.model = "llama-2-70b";
    p.sampling = {0.1, 0.6, 1024, 42};
    return p;
}

ProviderConfig llama3_preset() {
    ProviderConfig p;
    p.name = "llama-3.1-405b";
    p.model = "llama-3.1-405b-instruct";
    p.sampling = {0.2, 0.7, 1024, std::nullopt};
    return p;
}

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Live: return "live";
        case Mode::Record: return "record";
        case Mode::Replay: return "replay";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    if (s == "live") return Mode::Live;
    if (s == "record") return Mode::Record;
    if (s == "replay") return Mode::Replay;
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

RateLimiter::RateLimiter(std::size_t limit, std::chrono::steady_clock::duration window)
    : limit_(limit), window_(window) {}

void RateLimiter::acquire() {
    if (limit_ == 0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        while (!stamps_.empty() && now - stamps_.front() >= window_) stamps_.pop_front();
        if (stamps_.size() < limit_) {
            stamps_.push_back(now);
            return;
        }
        auto wake = stamps_.front() + window_;
        lock.unlock();
        std::this_thread::sleep_until(wake);
        lock.lock();
    }
}

json build_request(const ProviderConfig& provider, std::string_view prompt) {
    json body = {
        {"model", provider.model},
        {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"temperature", provider.sampling.temperature},
        {"max_tokens", provider.sampling.max_tokens},
    };
    if (provider.sampling.top_p) body["top_p"] = *provider.sampling.top_p;
    if (provider.sampling.seed) body["seed"] = *provider.sampling.seed;
    return body;
}

WireResult interpret_response(int http_status, std::string_view body) {
    if (http_status < 200 || http_status >= 300)
        return {Status::TransportError, "", "HTTP " + std::to_string(http_status)};

    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        return {Status::TransportError, "", "malformed response body"};

    const auto choices = parsed.find("choices");
    if (choices == parsed.end() || !choices->is_array() || choices->empty())
        return {Status::Refusal, "", "no choices"};

    const json& choice = choices->front();
    if (!choice.is_object()) return {Status::TransportError, "", "malformed choice"};
    std::string finish = choice.value("finish_reason", json()).is_string() ? choice.value("finish_reason", "") : "";
    const json message = choice.value("message", json::object());
    if (message.contains("refusal") && message["refusal"].is_string() && !message["refusal"].get<std::string>().empty())
        return {Status::Refusal, message["refusal"].get<std::string>(), "refusal"};

    std::string content;
    if (message.contains("content") && message["content"].is_string()) content = message["content"].get<std::string>();
    if (finish == "content_filter") return {Status::Refusal, content, "content_filter"};
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) return {Status::Refusal, content, "empty content"};
    return {Status::Ok, content, finish};
}

Gateway::Gateway(Mode mode, std::shared_ptr<ChatBackend> backend, std::shared_ptr<Cassette> cassette,
                 RetryPolicy retry)
    : mode_(mode), backend_(std::move(backend)), cassette_(std::move(cassette)), retry_(retry) {
    if (mode_ != Mode::Replay && !backend_) throw ConfigError("live and record modes need a chat backend");
    if (mode_ != Mode::Live && !cassette_) throw ConfigError("record and replay modes need a cassette");
}

RateLimiter* Gateway::limiter_for(const ProviderConfig& provider) {
    if (provider.requests_per_minute <= 0) return nullptr;
    std::lock_guard lock(limiter_mutex_);
    auto& slot = limiters_[provider.name + "\n" + provider.endpoint];
    if (!slot) {
        auto per_window = static_cast<std::size_t>(std::floor(provider.requests_per_minute));
        slot = std::make_unique<RateLimiter>(std::max<std::size_t>(per_window, 1), std::chrono::minutes(1));
    }
    return slot.get();
}

Completion Gateway::call(const TrialKey& key, const ProviderConfig& provider, std::string_view prompt) {
    if (mode_ == Mode::Replay) {
        auto hit = cassette_->find(key);
        if (!hit) throw CassetteMiss(key.to_string());
        return {hit->status, hit->response, hit->timestamp};
    }

    WireResult wire;
    auto backoff = retry_.initial_backoff;
    const int attempts = std::max(retry_.attempts, 1);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (auto* limiter = limiter_for(provider)) limiter->acquire();
        try {
            wire = backend_->send(provider, prompt);
        } catch (const std::exception& ex) {
            wire = {Status::TransportError, "", ex.what()};
        }
        // Refusals are outcomes, not failures; only transport errors are retried.
        if (wire.status != Status::TransportError || attempt == attempts) break;
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }

    Completion out{wire.status, wire.status == Status::TransportError ? wire.detail : wire.text, utc_timestamp()};
    if (mode_ == Mode::Record)
        cassette_->append({key, std::string(prompt), out.text, out.status, out.timestamp});
    return out;
}

std::string Gateway::complete(const ProviderConfig& provider, std::string_view prompt) {
    TrialKey key{"adhoc", "adhoc", provider.model, 0, prompt_digest(prompt)};
    {
        std::lock_guard lock(counter_mutex_);
        key.iteration = plain_calls_[key.digest + "\n" + key.model]++;
    }
    Completion c = call(key, provider, prompt);
    if (c.status == Status::TransportError) throw TransportError(c.text);
    if (c.status == Status::Refusal) throw Refusal(c.text.empty() ? "provider refused" : c.text);
    return c.text;
}

}  // namespace hashprompt::gateway
