#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bookrag/book_index.hpp"
#include "bookrag/operators.hpp"
#include "bookrag/planner.hpp"

namespace bookrag {

// All tunables in one place. Precedence: flags > environment > config file
// > defaults. The documented defaults table in the README mirrors this
// struct's initializers.
struct Config {
    struct Gateway {
        std::string mode = "mock";  // "mock" or "http"
        std::string llm_url;
        std::string llm_model;
        std::string vlm_url;
        std::string vlm_model;
        std::string embed_url;
        std::string embed_model;
        std::string rerank_url;
        std::string rerank_model;
        std::string api_key;  // usually via BOOKRAG_API_KEY
        int retries = 3;
        int backoff_ms = 200;
        int timeout_s = 60;
    } gateway;

    std::size_t embedding_dim = 64;

    struct Resolution {
        std::size_t top_k = 10;
        double g = 0.6;
        double tau_min = 0.0;
    } resolution;

    struct Planner {
        int section_depth = 1;
        int batch_size = 20;
    } planner;

    struct Reasoner {
        double damping = 0.85;
        double tolerance = 1e-8;
        int max_iterations = 200;
        double theta_link = 0.75;
        std::size_t render_cap = 1024;
    } reasoner;

    std::size_t embed_char_budget = 512;
    std::string prompts_dir;

    static Config load(const std::filesystem::path& file);  // file + env + defaults
    static Config from_json(const nlohmann::json& j);
    void apply_env();  // BOOKRAG_* variables
    void validate() const;

    BuildConfig build_config() const;
    ExecOptions exec_options() const;
    PlannerOptions planner_options() const;
};

}  // namespace bookrag
