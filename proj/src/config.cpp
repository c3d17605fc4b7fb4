#include "bookrag/config.hpp"

#include <cstdlib>
#include <fstream>

namespace bookrag {

namespace {

void read_string(const nlohmann::json& j, const char* key, std::string& out) {
    if (j.contains(key) && j[key].is_string()) out = j[key].get<std::string>();
}

template <typename T>
void read_number(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key) && j[key].is_number()) out = j[key].get<T>();
}

}  // namespace

Config Config::from_json(const nlohmann::json& j) {
    Config cfg;
    if (j.contains("gateway") && j["gateway"].is_object()) {
        const auto& g = j["gateway"];
        read_string(g, "mode", cfg.gateway.mode);
        read_string(g, "llm_url", cfg.gateway.llm_url);
        read_string(g, "llm_model", cfg.gateway.llm_model);
        read_string(g, "vlm_url", cfg.gateway.vlm_url);
        read_string(g, "vlm_model", cfg.gateway.vlm_model);
        read_string(g, "embed_url", cfg.gateway.embed_url);
        read_string(g, "embed_model", cfg.gateway.embed_model);
        read_string(g, "rerank_url", cfg.gateway.rerank_url);
        read_string(g, "rerank_model", cfg.gateway.rerank_model);
        read_string(g, "api_key", cfg.gateway.api_key);
        read_number(g, "retries", cfg.gateway.retries);
        read_number(g, "backoff_ms", cfg.gateway.backoff_ms);
        read_number(g, "timeout_s", cfg.gateway.timeout_s);
    }
    read_number(j, "embedding_dim", cfg.embedding_dim);
    if (j.contains("resolution") && j["resolution"].is_object()) {
        const auto& r = j["resolution"];
        read_number(r, "top_k", cfg.resolution.top_k);
        read_number(r, "g", cfg.resolution.g);
        read_number(r, "tau_min", cfg.resolution.tau_min);
    }
    if (j.contains("planner") && j["planner"].is_object()) {
        const auto& p = j["planner"];
        read_number(p, "section_depth", cfg.planner.section_depth);
        read_number(p, "batch_size", cfg.planner.batch_size);
    }
    if (j.contains("reasoner") && j["reasoner"].is_object()) {
        const auto& r = j["reasoner"];
        read_number(r, "damping", cfg.reasoner.damping);
        read_number(r, "tolerance", cfg.reasoner.tolerance);
        read_number(r, "max_iterations", cfg.reasoner.max_iterations);
        read_number(r, "theta_link", cfg.reasoner.theta_link);
        read_number(r, "render_cap", cfg.reasoner.render_cap);
    }
    read_number(j, "embed_char_budget", cfg.embed_char_budget);
    read_string(j, "prompts_dir", cfg.prompts_dir);
    return cfg;
}

Config Config::load(const std::filesystem::path& file) {
    Config cfg;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open config file: " + file.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file: " + std::string(e.what()));
        }
        cfg = from_json(j);
    }
    cfg.apply_env();
    cfg.validate();
    return cfg;
}

void Config::apply_env() {
    const auto env = [](const char* name) -> std::string {
        const char* v = std::getenv(name);
        return v ? std::string(v) : std::string();
    };
    if (auto v = env("BOOKRAG_GATEWAY_MODE"); !v.empty()) gateway.mode = v;
    if (auto v = env("BOOKRAG_LLM_URL"); !v.empty()) gateway.llm_url = v;
    if (auto v = env("BOOKRAG_LLM_MODEL"); !v.empty()) gateway.llm_model = v;
    if (auto v = env("BOOKRAG_VLM_URL"); !v.empty()) gateway.vlm_url = v;
    if (auto v = env("BOOKRAG_VLM_MODEL"); !v.empty()) gateway.vlm_model = v;
    if (auto v = env("BOOKRAG_EMBED_URL"); !v.empty()) gateway.embed_url = v;
    if (auto v = env("BOOKRAG_EMBED_MODEL"); !v.empty()) gateway.embed_model = v;
    if (auto v = env("BOOKRAG_RERANK_URL"); !v.empty()) gateway.rerank_url = v;
    if (auto v = env("BOOKRAG_RERANK_MODEL"); !v.empty()) gateway.rerank_model = v;
    if (auto v = env("BOOKRAG_API_KEY"); !v.empty()) gateway.api_key = v;
    if (auto v = env("BOOKRAG_PROMPTS_DIR"); !v.empty()) prompts_dir = v;
}

void Config::validate() const {
    if (gateway.mode != "mock" && gateway.mode != "http")
        throw ConfigError("gateway.mode must be 'mock' or 'http'");
    if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
    if (resolution.top_k < 1) throw ConfigError("resolution.top_k must be >= 1");
    if (!(resolution.g > 0.0 && resolution.g <= 1.0))
        throw ConfigError("resolution.g must be in (0, 1]");
    if (resolution.tau_min < 0.0) throw ConfigError("resolution.tau_min must be >= 0");
    if (planner.section_depth < 1) throw ConfigError("planner.section_depth must be >= 1");
    if (planner.batch_size < 1) throw ConfigError("planner.batch_size must be >= 1");
    if (!(reasoner.damping > 0.0 && reasoner.damping < 1.0))
        throw ConfigError("reasoner.damping must be in (0, 1)");
    if (reasoner.tolerance <= 0.0) throw ConfigError("reasoner.tolerance must be positive");
    if (reasoner.max_iterations < 1) throw ConfigError("reasoner.max_iterations must be >= 1");
    if (reasoner.theta_link < 0.0 || reasoner.theta_link > 1.0)
        throw ConfigError("reasoner.theta_link must be in [0, 1]");
    if (gateway.retries < 1) throw ConfigError("gateway.retries must be >= 1");
}

BuildConfig Config::build_config() const {
    BuildConfig b;
    b.resolution.top_k = resolution.top_k;
    b.resolution.g = resolution.g;
    b.resolution.tau_min = resolution.tau_min;
    b.resolution.embed_char_budget = embed_char_budget;
    b.batch_size = planner.batch_size;
    return b;
}

ExecOptions Config::exec_options() const {
    ExecOptions e;
    e.pagerank.damping = reasoner.damping;
    e.pagerank.tolerance = reasoner.tolerance;
    e.pagerank.max_iterations = reasoner.max_iterations;
    e.theta_link = reasoner.theta_link;
    e.render_cap = reasoner.render_cap;
    return e;
}

PlannerOptions Config::planner_options() const {
    PlannerOptions p;
    p.section_depth = planner.section_depth;
    return p;
}

}  // namespace bookrag
