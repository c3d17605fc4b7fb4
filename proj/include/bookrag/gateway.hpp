#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bookrag/common.hpp"

namespace bookrag {

// A prompt after slot substitution. `template_name` and `salient` identify
// the call for scripted backends; live backends only look at `text`.
struct RenderedPrompt {
    std::string template_name;
    std::string salient;
    std::string text;
    std::map<std::string, std::string> slots;  // bound slot values, for mock heuristics
};

struct UsageSnapshot {
    std::uint64_t calls = 0;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::uint64_t total_tokens() const { return prompt_tokens + completion_tokens; }
};

struct RetryPolicy {
    int attempts = 3;
    int backoff_ms = 200;  // doubled per retry
};

// Single abstraction over the four model roles: LLM completion, VLM
// completion, text embedding, and query-conditional reranking.
class ModelGateway {
public:
    virtual ~ModelGateway() = default;

    virtual std::string complete(const RenderedPrompt& prompt) = 0;
    virtual std::string complete_vision(const RenderedPrompt& prompt,
                                        const std::vector<unsigned char>& image) = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
    // One score per candidate, in input order; sorting is the caller's job.
    virtual std::vector<double> rerank(const std::string& query,
                                       const std::vector<std::string>& candidates) = 0;
    virtual std::size_t embedding_dim() const = 0;

    std::string complete_text(const std::string& text) {
        return complete(RenderedPrompt{"raw", text, text, {}});
    }

    UsageSnapshot usage() const;
    // Usage recorded by calls made on the current thread; lets callers
    // attribute token cost per work item under a worker pool.
    static UsageSnapshot thread_usage();

protected:
    void record_usage(std::uint64_t prompt_tokens, std::uint64_t completion_tokens);

private:
    std::atomic<std::uint64_t> calls_{0};
    std::atomic<std::uint64_t> prompt_tokens_{0};
    std::atomic<std::uint64_t> completion_tokens_{0};
};

// Rough whitespace token count used for accounting.
std::uint64_t approx_token_count(const std::string& text);

}  // namespace bookrag
