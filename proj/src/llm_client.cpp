#include "chatpc/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chatpc/errors.hpp"

namespace chatpc {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
    std::string path_prefix;       // e.g. "/v1", possibly empty
};

ParsedUrl parse_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw TransportError("base_url must start with http:// or https://: " + base_url, 0);
    auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
    }
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    return out;
}

}  // namespace

LlmClient::LlmClient(LlmConfig config, std::shared_ptr<CassetteStore> cassette, bool replay_only)
    : config_(std::move(config)), cassette_(std::move(cassette)), replay_only_(replay_only) {
    if (config_.batch_size < 1) throw InvalidQuery("llm batch size must be >= 1");
    if (config_.timeout_seconds <= 0) throw InvalidQuery("llm timeout must be positive");
}

LlmClient::BatchResult LlmClient::complete_batch(const PromptBundle& prompt) {
    if (cassette_) {
        if (auto hit = cassette_->lookup(prompt.fingerprint))
            return {hit->completions, true};
    }
    if (replay_only_)
        throw StoreIoError("replay-only run but no cassette entry for " + prompt.query.display() +
                           " (fingerprint " + prompt.fingerprint + ")");

    std::vector<std::string> completions = complete_live(prompt);
    if (cassette_) {
        CassetteEntry entry;
        entry.fingerprint = prompt.fingerprint;
        entry.query = prompt.query;
        entry.model = config_.model;
        entry.completions = completions;
        entry.created_at = now_utc_iso8601();
        cassette_->record(entry);
    }
    return {std::move(completions), false};
}

std::vector<std::string> LlmClient::complete_live(const PromptBundle& prompt) {
    const char* key = std::getenv(config_.api_key_source.c_str());
    if (key == nullptr || *key == '\0')
        throw AuthError("no API key in environment variable " + config_.api_key_source);

    const ParsedUrl url = parse_base_url(config_.base_url);
    httplib::Client cli(url.scheme_host_port);
    cli.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(config_.timeout_seconds * 1000)));
    cli.set_read_timeout(std::chrono::milliseconds(
        static_cast<int>(config_.timeout_seconds * 1000)));
    cli.set_bearer_token_auth(key);

    json messages = json::array();
    for (const auto& m : prompt.messages)
        messages.push_back({{"role", m.role}, {"content", m.text}});

    std::vector<std::string> completions;
    const int budget = 1 + std::max(0, config_.max_retries);
    int attempts = 0;

    while (static_cast<int>(completions.size()) < config_.batch_size) {
        const int want = config_.batch_size - static_cast<int>(completions.size());
        json body{{"model", config_.model},
                  {"messages", messages},
                  {"temperature", config_.temperature},
                  {"n", want}};

        httplib::Result res;
        std::string last_error;
        double retry_after = 0.0;
        bool rate_limited = false;
        for (attempts = 0; attempts < budget; ++attempts) {
            if (attempts > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(25 * attempts));
            res = cli.Post((url.path_prefix + "/chat/completions").c_str(), body.dump(),
                           "application/json");
            if (!res) {
                last_error = "connection failed: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 401 || res->status == 403)
                throw AuthError("provider rejected credentials (HTTP " +
                                std::to_string(res->status) + ")");
            if (res->status == 429) {
                rate_limited = true;
                if (res->has_header("Retry-After")) {
                    try {
                        retry_after = std::stod(res->get_header_value("Retry-After"));
                    } catch (const std::exception&) {
                        retry_after = 0.0;
                    }
                }
                last_error = "rate limited (HTTP 429)";
                continue;
            }
            if (res->status != 200) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            break;
        }
        if (!res || res->status != 200) {
            if (rate_limited) throw RateLimited(last_error, retry_after);
            throw TransportError("chat completion failed after " + std::to_string(attempts) +
                                     " attempts: " + last_error,
                                 attempts);
        }

        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::exception& e) {
            throw MalformedProviderReply(std::string("reply is not JSON: ") + e.what());
        }
        if (!reply.contains("choices") || !reply.at("choices").is_array() ||
            reply.at("choices").empty())
            throw MalformedProviderReply("reply carries no choices");
        for (const auto& choice : reply.at("choices")) {
            if (static_cast<int>(completions.size()) >= config_.batch_size) break;
            if (!choice.contains("message") || !choice.at("message").contains("content") ||
                !choice.at("message").at("content").is_string())
                throw MalformedProviderReply("choice lacks message.content");
            completions.push_back(choice.at("message").at("content").get<std::string>());
        }
    }
    return completions;
}

}  // namespace chatpc
