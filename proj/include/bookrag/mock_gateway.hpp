#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "bookrag/gateway.hpp"

namespace bookrag {

// Fully deterministic gateway backend. Responses come from a script table
// keyed by (template name, salient slot). In strict mode an unscripted call
// throws, which keeps test fixtures honest; in heuristic mode it falls back
// to rule-based responses so whole pipelines can run unscripted (`--mock`).
//
// The embedder is a feature-hashed bag-of-words (L2-normalized) and the
// reranker is Jaccard token overlap, so every score is reproducible bitwise.
class MockGateway : public ModelGateway {
public:
    enum class Mode { Strict, Heuristic };

    explicit MockGateway(Mode mode = Mode::Strict, std::size_t dim = 64);

    void script(const std::string& template_name, const std::string& salient,
                const std::string& response);
    // The next `times` lookups of this key fail with a transient error;
    // exercises the retry policy.
    void fail_times(const std::string& template_name, const std::string& salient, int times);
    // Pin the embedding returned for an exact input string.
    void set_embedding(const std::string& text, std::vector<double> embedding);

    // Script file: JSON object {"<template>:<salient>": "response", ...}.
    void load_script_file(const std::filesystem::path& path);
    // Current script table in the script-file format.
    std::map<std::string, std::string> script_table() const;

    void set_retry_policy(RetryPolicy policy) { retry_ = policy; }

    std::string complete(const RenderedPrompt& prompt) override;
    std::string complete_vision(const RenderedPrompt& prompt,
                                const std::vector<unsigned char>& image) override;
    std::vector<double> embed(const std::string& text) override;
    std::vector<double> rerank(const std::string& query,
                               const std::vector<std::string>& candidates) override;
    std::size_t embedding_dim() const override { return dim_; }

    static double jaccard(const std::string& a, const std::string& b);

private:
    std::string lookup(const RenderedPrompt& prompt);
    std::string heuristic_response(const RenderedPrompt& prompt) const;

    Mode mode_;
    std::size_t dim_;
    RetryPolicy retry_;
    std::map<std::string, std::string> scripts_;
    std::map<std::string, int> failures_;
    std::map<std::string, std::vector<double>> pinned_embeddings_;
    mutable std::mutex mutex_;
};

}  // namespace bookrag
