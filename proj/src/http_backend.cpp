#include <httplib.h>

#include <cstdlib>

#include "hashprompt/error.hpp"
#include "hashprompt/gateway.hpp"

namespace hashprompt::gateway {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpChatBackend::HttpChatBackend(std::chrono::seconds timeout) : timeout_(timeout) {}

WireResult HttpChatBackend::send(const ProviderConfig& provider, std::string_view prompt) {
    auto [origin, path] = split_url(provider.endpoint);

    // A fresh client per call: no connection or conversation state is shared between trials.
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    httplib::Headers headers;
    if (!provider.api_key_env.empty()) {
        const char* key = std::getenv(provider.api_key_env.c_str());
        if (!key || !*key) throw ConfigError("environment variable " + provider.api_key_env + " is not set");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto result = client.Post(path, headers, build_request(provider, prompt).dump(), "application/json");
    if (!result) return {Status::TransportError, "", "transport: " + httplib::to_string(result.error())};
    return interpret_response(result->status, result->body);
}

}  // namespace hashprompt::gateway
