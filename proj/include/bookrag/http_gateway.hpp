#pragma once

#include <string>
#include <vector>

#include "bookrag/gateway.hpp"

namespace bookrag {

struct HttpGatewayConfig {
    // Base URLs including any path prefix, e.g. "http://host:8000/v1".
    std::string llm_url;
    std::string llm_model;
    std::string vlm_url;  // falls back to llm_url when empty
    std::string vlm_model;
    std::string embed_url;
    std::string embed_model;
    std::string rerank_url;
    std::string rerank_model;
    std::string api_key;
    std::size_t embedding_dim = 0;  // validated against the first response
    RetryPolicy retry;
    int timeout_s = 60;
};

// Live backend speaking the common hosted-model HTTP protocol:
// POST {llm_url}/chat/completions, POST {embed_url}/embeddings and
// POST {rerank_url}/rerank. Transport failures and 5xx responses are
// retried with exponential backoff before raising GatewayError/TimeoutError.
class HttpGateway : public ModelGateway {
public:
    explicit HttpGateway(HttpGatewayConfig config);

    std::string complete(const RenderedPrompt& prompt) override;
    std::string complete_vision(const RenderedPrompt& prompt,
                                const std::vector<unsigned char>& image) override;
    std::vector<double> embed(const std::string& text) override;
    std::vector<double> rerank(const std::string& query,
                               const std::vector<std::string>& candidates) override;
    std::size_t embedding_dim() const override { return config_.embedding_dim; }

private:
    std::string post_json(const std::string& base_url, const std::string& path,
                          const std::string& body);
    std::string chat(const std::string& url, const std::string& model,
                     const RenderedPrompt& prompt, const std::string& image_data_url);

    HttpGatewayConfig config_;
};

}  // namespace bookrag
