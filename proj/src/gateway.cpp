#include "bookrag/gateway.hpp"

namespace bookrag {

namespace {
thread_local UsageSnapshot tl_usage;
}

UsageSnapshot ModelGateway::usage() const {
    UsageSnapshot s;
    s.calls = calls_.load();
    s.prompt_tokens = prompt_tokens_.load();
    s.completion_tokens = completion_tokens_.load();
    return s;
}

UsageSnapshot ModelGateway::thread_usage() { return tl_usage; }

void ModelGateway::record_usage(std::uint64_t prompt_tokens, std::uint64_t completion_tokens) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    prompt_tokens_.fetch_add(prompt_tokens, std::memory_order_relaxed);
    completion_tokens_.fetch_add(completion_tokens, std::memory_order_relaxed);
    tl_usage.calls += 1;
    tl_usage.prompt_tokens += prompt_tokens;
    tl_usage.completion_tokens += completion_tokens;
}

std::uint64_t approx_token_count(const std::string& text) {
    std::uint64_t count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

}  // namespace bookrag
