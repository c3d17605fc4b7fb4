#include "bookrag/http_gateway.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace bookrag {

namespace {

// "http://host:port/v1" -> ("http://host:port", "/v1")
std::pair<std::string, std::string> split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("gateway URL must include a scheme: " + url);
    const std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path), prefix};
}

}  // namespace

HttpGateway::HttpGateway(HttpGatewayConfig config) : config_(std::move(config)) {
    if (config_.llm_url.empty()) throw ConfigError("gateway: llm_url is required");
    if (config_.embed_url.empty()) throw ConfigError("gateway: embed_url is required");
    if (config_.rerank_url.empty()) throw ConfigError("gateway: rerank_url is required");
    if (config_.vlm_url.empty()) config_.vlm_url = config_.llm_url;
    if (config_.embedding_dim == 0)
        throw ConfigError("gateway: embedding_dim must be configured for the http backend");
}

std::string HttpGateway::post_json(const std::string& base_url, const std::string& path,
                                   const std::string& body) {
    const auto [host, prefix] = split_url(base_url);
    std::string last_error;
    bool timed_out = false;

    for (int attempt = 1; attempt <= config_.retry.attempts; ++attempt) {
        if (attempt > 1) {
            const int backoff = config_.retry.backoff_ms * (1 << (attempt - 2));
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        }
        httplib::Client client(host);
        client.set_connection_timeout(config_.timeout_s, 0);
        client.set_read_timeout(config_.timeout_s, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto res = client.Post(prefix + path, headers, body, "application/json");
        if (!res) {
            timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                        res.error() == httplib::Error::Read;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {  // retryable server errors
            last_error = "HTTP " + std::to_string(res->status);
            timed_out = false;
            continue;
        }
        if (res->status != 200)
            throw GatewayError("HTTP " + std::to_string(res->status) + " from " + host +
                               prefix + path + ": " + res->body.substr(0, 200));
        return res->body;
    }
    if (timed_out)
        throw TimeoutError("request to " + host + prefix + path + " timed out after " +
                           std::to_string(config_.retry.attempts) + " attempts");
    throw GatewayError("request to " + host + prefix + path + " failed after " +
                       std::to_string(config_.retry.attempts) +
                       " attempts: " + last_error);
}

std::string HttpGateway::chat(const std::string& url, const std::string& model,
                              const RenderedPrompt& prompt,
                              const std::string& image_data_url) {
    if (trim(prompt.text).empty()) throw Error("complete: empty prompt");
    nlohmann::json message;
    message["role"] = "user";
    if (image_data_url.empty()) {
        message["content"] = prompt.text;
    } else {
        message["content"] = nlohmann::json::array(
            {{{"type", "text"}, {"text", prompt.text}},
             {{"type", "image_url"}, {"image_url", {{"url", image_data_url}}}}});
    }
    nlohmann::json body;
    body["model"] = model;
    body["messages"] = nlohmann::json::array({message});
    body["temperature"] = 0;

    const std::string raw = post_json(url, "/chat/completions", body.dump());
    try {
        const nlohmann::json doc = nlohmann::json::parse(raw);
        const std::string content =
            doc.at("choices").at(0).at("message").at("content").get<std::string>();
        std::uint64_t prompt_tokens = approx_token_count(prompt.text);
        std::uint64_t completion_tokens = approx_token_count(content);
        if (doc.contains("usage")) {
            const auto& usage = doc["usage"];
            if (usage.contains("prompt_tokens"))
                prompt_tokens = usage["prompt_tokens"].get<std::uint64_t>();
            if (usage.contains("completion_tokens"))
                completion_tokens = usage["completion_tokens"].get<std::uint64_t>();
        }
        record_usage(prompt_tokens, completion_tokens);
        return content;
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError("chat response unparsable: " + std::string(e.what()));
    }
}

std::string HttpGateway::complete(const RenderedPrompt& prompt) {
    return chat(config_.llm_url, config_.llm_model, prompt, "");
}

std::string HttpGateway::complete_vision(const RenderedPrompt& prompt,
                                         const std::vector<unsigned char>& image) {
    if (image.empty()) throw Error("complete_vision: empty image");
    const std::string data_url =
        "data:image/png;base64," + base64_encode(image.data(), image.size());
    return chat(config_.vlm_url, config_.vlm_model, prompt, data_url);
}

std::vector<double> HttpGateway::embed(const std::string& text) {
    if (text.empty()) throw GatewayError("embed: empty input text");
    nlohmann::json body;
    body["model"] = config_.embed_model;
    body["input"] = text;
    const std::string raw = post_json(config_.embed_url, "/embeddings", body.dump());
    try {
        const nlohmann::json doc = nlohmann::json::parse(raw);
        std::vector<double> v =
            doc.at("data").at(0).at("embedding").get<std::vector<double>>();
        if (v.size() != config_.embedding_dim)
            throw DimensionMismatch("embedding backend returned dimension " +
                                    std::to_string(v.size()) + ", configured " +
                                    std::to_string(config_.embedding_dim));
        record_usage(approx_token_count(text), 0);
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError("embedding response unparsable: " + std::string(e.what()));
    }
}

std::vector<double> HttpGateway::rerank(const std::string& query,
                                        const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw GatewayError("rerank: no candidates");
    nlohmann::json body;
    body["model"] = config_.rerank_model;
    body["query"] = query;
    body["documents"] = candidates;
    const std::string raw = post_json(config_.rerank_url, "/rerank", body.dump());
    try {
        const nlohmann::json doc = nlohmann::json::parse(raw);
        std::vector<double> scores(candidates.size(), 0.0);
        for (const auto& item : doc.at("results")) {
            const std::size_t index = item.at("index").get<std::size_t>();
            if (index >= scores.size())
                throw GatewayError("rerank result index out of range");
            scores[index] = item.at("relevance_score").get<double>();
        }
        std::uint64_t tokens = approx_token_count(query);
        for (const auto& c : candidates) tokens += approx_token_count(c);
        record_usage(tokens, 0);
        return scores;
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError("rerank response unparsable: " + std::string(e.what()));
    }
}

}  // namespace bookrag
