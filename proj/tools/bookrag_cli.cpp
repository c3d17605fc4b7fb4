// Command-line front door: build and inspect indexes, answer queries, run
// evaluations. Exit codes: 0 ok, 1 usage, 2 data error, 3 gateway error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "bookrag/book_index.hpp"
#include "bookrag/config.hpp"
#include "bookrag/evaluation.hpp"
#include "bookrag/graph_stats.hpp"
#include "bookrag/http_gateway.hpp"
#include "bookrag/ingest.hpp"
#include "bookrag/mock_gateway.hpp"
#include "bookrag/operators.hpp"
#include "bookrag/planner.hpp"

namespace {

using namespace bookrag;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitGateway = 3;

struct GlobalFlags {
    std::string config_file;
    bool mock = false;
    std::string mock_script;
    double g = -1.0;
    int top_k = -1;
    double tau_min = -1.0;
    int workers = 1;
};

Config make_config(const GlobalFlags& flags) {
    Config cfg = Config::load(flags.config_file);
    if (flags.mock) cfg.gateway.mode = "mock";
    if (flags.g > 0.0) cfg.resolution.g = flags.g;
    if (flags.top_k > 0) cfg.resolution.top_k = static_cast<std::size_t>(flags.top_k);
    if (flags.tau_min >= 0.0) cfg.resolution.tau_min = flags.tau_min;
    cfg.validate();
    return cfg;
}

std::unique_ptr<ModelGateway> make_gateway(const Config& cfg, const GlobalFlags& flags) {
    if (cfg.gateway.mode == "mock") {
        auto mock = std::make_unique<MockGateway>(MockGateway::Mode::Heuristic,
                                                  cfg.embedding_dim);
        mock->set_retry_policy(RetryPolicy{cfg.gateway.retries, 0});
        if (!flags.mock_script.empty()) mock->load_script_file(flags.mock_script);
        return mock;
    }
    HttpGatewayConfig http;
    http.llm_url = cfg.gateway.llm_url;
    http.llm_model = cfg.gateway.llm_model;
    http.vlm_url = cfg.gateway.vlm_url;
    http.vlm_model = cfg.gateway.vlm_model;
    http.embed_url = cfg.gateway.embed_url;
    http.embed_model = cfg.gateway.embed_model;
    http.rerank_url = cfg.gateway.rerank_url;
    http.rerank_model = cfg.gateway.rerank_model;
    http.api_key = cfg.gateway.api_key;
    http.embedding_dim = cfg.embedding_dim;
    http.retry = RetryPolicy{cfg.gateway.retries, cfg.gateway.backoff_ms};
    http.timeout_s = cfg.gateway.timeout_s;
    return std::make_unique<HttpGateway>(std::move(http));
}

PromptLibrary make_prompts(const Config& cfg) {
    PromptLibrary prompts;
    if (!cfg.prompts_dir.empty()) prompts.load_overrides(cfg.prompts_dir);
    return prompts;
}

int cmd_index_build(const GlobalFlags& flags, const std::string& doc_path,
                    const std::string& out_dir, const std::string& report_file) {
    const Config cfg = make_config(flags);
    const auto gateway = make_gateway(cfg, flags);
    const PromptLibrary prompts = make_prompts(cfg);

    Warnings load_warnings;
    const DocumentSource src = load_blocks(doc_path, &load_warnings);
    const auto violations = validate_source(src);
    if (!violations.empty()) throw FormatError("invalid document: " + violations.front());

    BuildStats stats;
    const BookIndex index = build_index(src, *gateway, cfg.build_config(), prompts, &stats);
    save_index(index, out_dir);

    nlohmann::json report;
    report["doc_id"] = index.doc_id;
    report["nodes"] = index.tree.size() - 1;  // content nodes, root excluded
    report["entities"] = index.graph.entities.size();
    report["relations"] = index.graph.relations.size();
    report["entities_extracted"] = stats.entities_extracted;
    report["merges"] = stats.merges;
    report["nodes_failed"] = stats.nodes_failed;
    nlohmann::json warnings_json = load_warnings;
    for (const auto& w : stats.warnings) warnings_json.push_back(w);
    report["warnings"] = warnings_json;

    std::cout << report.dump(2) << "\n";
    if (!report_file.empty()) {
        std::ofstream out(report_file);
        out << report.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_index_stats(const GlobalFlags& flags, const std::string& index_dir) {
    (void)make_config(flags);
    const BookIndex index = load_index(index_dir);
    const GraphStats stats = compute_graph_stats(index.graph);
    std::cout << "# Entity: " << stats.entity_count << "\n";
    std::cout << "Density: " << std::setprecision(10) << stats.density << "\n";
    std::cout << "Diameter: " << stats.diameter << "\n";
    std::cout << "# CC: " << stats.connected_components << "\n";
    return kExitOk;
}

int cmd_query(const GlobalFlags& flags, const std::string& index_dir,
              const std::string& question, bool trace, bool plan_only, bool timings) {
    const Config cfg = make_config(flags);
    const auto gateway = make_gateway(cfg, flags);
    const PromptLibrary prompts = make_prompts(cfg);
    const BookIndex index = load_index(index_dir);

    const QueryCategory category = classify(question, *gateway, prompts);
    Warnings warnings;
    const QueryPlan plan =
        make_plan(question, category, *gateway, prompts, cfg.planner_options(), &warnings);

    if (plan_only) {
        std::cout << plan.to_json().dump(2) << "\n";
        return kExitOk;
    }

    ExecOptions exec = cfg.exec_options();
    exec.prompts = &prompts;
    const ExecutionResult result = execute(plan, index, *gateway, exec);

    std::cout << result.answer << "\n";
    if (trace) {
        nlohmann::json out;
        out["category"] = category_name(category);
        out["trace"] = result.trace.to_json(timings);
        nlohmann::json retrieved = nlohmann::json::array();
        for (const ScoredNode& n : result.retrieved.nodes) {
            nlohmann::json j{{"id", n.id}};
            if (n.s_graph) j["s_graph"] = *n.s_graph;
            if (n.s_text) j["s_text"] = *n.s_text;
            retrieved.push_back(std::move(j));
        }
        out["retrieved"] = std::move(retrieved);
        if (!warnings.empty() || !result.warnings.empty()) {
            nlohmann::json w = warnings;
            for (const auto& x : result.warnings) w.push_back(x);
            out["warnings"] = std::move(w);
        }
        std::cout << out.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_eval(const GlobalFlags& flags, const std::string& target,
             const std::string& dataset_path, const std::string& report_file) {
    const Config cfg = make_config(flags);
    const auto gateway = make_gateway(cfg, flags);
    const PromptLibrary prompts = make_prompts(cfg);

    const std::vector<QaExample> dataset = load_dataset(dataset_path);

    // target: an index directory, or a corpus manifest {doc_id: index_dir}
    std::map<std::string, BookIndex> loaded;
    if (std::filesystem::is_directory(target)) {
        BookIndex index = load_index(target);
        loaded.emplace(index.doc_id, std::move(index));
    } else {
        std::ifstream in(target);
        if (!in) throw IoError("cannot open corpus manifest: " + target);
        nlohmann::json manifest;
        in >> manifest;
        for (auto it = manifest.begin(); it != manifest.end(); ++it)
            loaded.emplace(it.key(), load_index(it.value().get<std::string>()));
    }
    std::map<std::string, const BookIndex*> indexes;
    for (const auto& [doc_id, index] : loaded) indexes[doc_id] = &index;

    EvalOptions options;
    options.planner = cfg.planner_options();
    options.exec = cfg.exec_options();
    options.exec.prompts = &prompts;
    options.workers = flags.workers;

    const EvalReport report = run_eval(dataset, indexes, *gateway, prompts, options);
    std::cout << report.to_table();
    if (!report_file.empty()) {
        std::ofstream out(report_file);
        out << report.to_json().dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bookrag: hierarchical document QA engine"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_file, "Config file (JSON)");
    app.add_flag("--mock", flags.mock, "Use the deterministic mock gateway");
    app.add_option("--mock-script", flags.mock_script,
                   "Scripted responses for the mock gateway (JSON)");
    app.add_option("--g", flags.g, "Entity-resolution gradient threshold override");
    app.add_option("--top-k", flags.top_k, "Entity-resolution top-k override");
    app.add_option("--tau-min", flags.tau_min,
                   "Entity-resolution absolute rerank floor override");
    app.add_option("--workers", flags.workers, "Eval worker pool size");

    auto* index_cmd = app.add_subcommand("index", "Index operations");
    index_cmd->require_subcommand(1);

    std::string doc_path, out_dir, report_file;
    auto* build_cmd = index_cmd->add_subcommand("build", "Build an index from a block-list file");
    build_cmd->add_option("doc", doc_path, "Block-list file")->required();
    build_cmd->add_option("-o,--out", out_dir, "Output index directory")->required();
    build_cmd->add_option("--report", report_file, "Write the build report here");

    std::string stats_dir;
    auto* stats_cmd = index_cmd->add_subcommand("stats", "Print graph statistics");
    stats_cmd->add_option("dir", stats_dir, "Index directory")->required();

    std::string query_dir, question;
    bool trace = false, plan_only = false, timings = false;
    auto* query_cmd = app.add_subcommand("query", "Answer a question against an index");
    query_cmd->add_option("dir", query_dir, "Index directory")->required();
    query_cmd->add_option("question", question, "The question")->required();
    query_cmd->add_flag("--trace", trace, "Print the operator trace and retrieval set");
    query_cmd->add_flag("--plan-only", plan_only, "Print the plan without executing");
    query_cmd->add_flag("--timings", timings, "Include wall-clock durations in the trace");

    std::string eval_target, dataset_path, eval_report;
    auto* eval_cmd = app.add_subcommand("eval", "Run a QA dataset");
    eval_cmd->add_option("target", eval_target, "Index directory or corpus manifest")
        ->required();
    eval_cmd->add_option("dataset", dataset_path, "Dataset file (JSONL)")->required();
    eval_cmd->add_option("-o,--out", eval_report, "Write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or help text
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build_cmd->parsed()) return cmd_index_build(flags, doc_path, out_dir, report_file);
        if (stats_cmd->parsed()) return cmd_index_stats(flags, stats_dir);
        if (query_cmd->parsed())
            return cmd_query(flags, query_dir, question, trace, plan_only, timings);
        if (eval_cmd->parsed()) return cmd_eval(flags, eval_target, dataset_path, eval_report);
        std::cerr << app.help() << "\n";
        return kExitUsage;
    } catch (const GatewayError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return kExitGateway;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
