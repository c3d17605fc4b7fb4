#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bookrag/book_index.hpp"
#include "bookrag/gateway.hpp"
#include "bookrag/pagerank.hpp"
#include "bookrag/planner.hpp"
#include "bookrag/prompts.hpp"
#include "bookrag/skyline.hpp"

namespace bookrag {

struct ScoredNode {
    std::string id;
    std::optional<double> s_graph;
    std::optional<double> s_text;
};

struct RetrievalSet {
    std::vector<ScoredNode> nodes;  // unique ids
};

struct SubAnswer {
    std::string question;
    std::string answer;
    std::vector<std::string> evidence;  // node ids backing the answer
    bool failed = false;
};

struct TraceStep {
    std::string op;
    std::size_t input_size = 0;
    std::size_t output_size = 0;
    double duration_ms = 0.0;
    std::uint64_t tokens = 0;
};

// One record per executed retrieval pipeline; |N_R| <= |N_s| <= |N| holds
// for every record.
struct TraceRecord {
    std::string label;
    std::size_t n_total = 0;     // |N|
    std::size_t n_selected = 0;  // |N_s|
    std::size_t n_retained = 0;  // |N_R|
};

struct Trace {
    std::vector<TraceStep> steps;
    std::vector<TraceRecord> records;

    // Durations are wall-clock and excluded by default so that traces of
    // identical runs compare byte-identical.
    nlohmann::json to_json(bool include_timings = false) const;
};

struct ExecutionResult {
    std::string answer;
    RetrievalSet retrieved;
    Trace trace;
    Warnings warnings;
};

struct ExecOptions {
    PageRankOptions pagerank;
    double theta_link = 0.75;       // entity-linking cosine floor
    std::size_t render_cap = 1024;  // chars of node content shown to models
    const PromptLibrary* prompts = nullptr;  // defaults to the built-in library
};

enum class SubQuestionKind { Retrieval, Synthesis };

// ---- Formulators ----------------------------------------------------------

std::vector<std::pair<std::string, SubQuestionKind>> decompose(const std::string& query,
                                                               ModelGateway& gateway,
                                                               const PromptLibrary& prompts);

// Query mentions linked to graph entities: exact normalized-name match
// first, then nearest embedding above theta_link; unlinkable mentions drop.
// An empty result signals the Select_by_Section fallback.
std::vector<std::string> extract_entities(const std::string& query, const BookIndex& index,
                                          ModelGateway& gateway, const PromptLibrary& prompts,
                                          double theta_link, Warnings* warnings = nullptr);

// ---- Selectors -------------------------------------------------------------

std::vector<std::string> filter_modal(const BookIndex& index,
                                      const std::vector<std::string>& nodes, NodeType type);
std::vector<std::string> filter_range_pages(const BookIndex& index,
                                            const std::vector<std::string>& nodes, int first,
                                            int last);
std::vector<std::string> filter_range_section(const BookIndex& index,
                                              const std::vector<std::string>& nodes,
                                              const std::string& section_title,
                                              Warnings* warnings = nullptr);

// Union of subtrees of the entity's target sections: for each origin, the
// Section ancestor at `depth`, or the nearest one when the chain is
// shallower. Never includes the synthetic root.
std::vector<std::string> select_by_entity(const BookIndex& index, const std::string& entity_id,
                                          int depth);

// Model picks >=1 of the depth-level section titles; unmatched titles are
// ignored with a warning, zero matches is NoSectionSelected.
std::vector<std::string> select_by_section(const BookIndex& index, const std::string& query,
                                           ModelGateway& gateway, const PromptLibrary& prompts,
                                           int depth, Warnings* warnings = nullptr);

// ---- Reasoners -------------------------------------------------------------

// Personalized PageRank over the scope-induced entity subgraph, folded back
// onto scope nodes through entity origins. Nodes without entity mass score 0.
std::map<std::string, double> graph_reasoning(const BookIndex& index,
                                              const std::vector<std::string>& start_entities,
                                              const std::vector<std::string>& scope,
                                              const PageRankOptions& options,
                                              Warnings* warnings = nullptr);

std::map<std::string, double> text_reasoning(const BookIndex& index, const std::string& query,
                                             const std::vector<std::string>& scope,
                                             ModelGateway& gateway, std::size_t render_cap);

// Pareto frontier of the scored nodes; every point needs both scores.
RetrievalSet skyline_ranker(const std::vector<ScoredNode>& points);

// ---- Synthesizers ----------------------------------------------------------

std::vector<SubAnswer> map_synthesize(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& items,
    const BookIndex& index, ModelGateway& gateway, const PromptLibrary& prompts,
    std::size_t render_cap);

std::string reduce_synthesize(const std::string& query, const std::vector<SubAnswer>& parts,
                              const std::vector<std::string>& instructions,
                              ModelGateway& gateway, const PromptLibrary& prompts);

std::string reduce_over_nodes(const std::string& query, const std::vector<std::string>& nodes,
                              const BookIndex& index, ModelGateway& gateway,
                              const PromptLibrary& prompts, std::size_t render_cap);

// Node content as shown to models (caption or placeholder for images),
// truncated to `cap` characters.
std::string render_node(const BookIndex& index, const std::string& node_id, std::size_t cap);

// ---- Executor --------------------------------------------------------------

ExecutionResult execute(const QueryPlan& plan, const BookIndex& index, ModelGateway& gateway,
                        const ExecOptions& options = {});

}  // namespace bookrag
