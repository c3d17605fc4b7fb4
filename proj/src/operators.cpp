#include "bookrag/operators.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace bookrag {

// ---- Formulators ----------------------------------------------------------

std::vector<std::pair<std::string, SubQuestionKind>> decompose(const std::string& query,
                                                               ModelGateway& gateway,
                                                               const PromptLibrary& prompts) {
    if (trim(query).empty()) throw Error("decompose: empty query");
    const RenderedPrompt prompt = prompts.render("decompose", {{"query", query}}, query);
    const std::string response = gateway.complete(prompt);

    nlohmann::json doc;
    try {
        const std::string payload = extract_json_payload(response);
        if (payload.empty()) throw MalformedVerdict("decompose: no JSON in model output");
        doc = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedVerdict("decompose: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("sub_questions") || !doc["sub_questions"].is_array())
        throw MalformedVerdict("decompose: missing 'sub_questions'");

    std::vector<std::pair<std::string, SubQuestionKind>> out;
    for (const auto& js : doc["sub_questions"]) {
        if (!js.is_object() || !js.contains("question") || !js.contains("type")) continue;
        const std::string text = trim(js["question"].get<std::string>());
        if (text.empty()) continue;
        const std::string kind = to_lower(js["type"].get<std::string>());
        if (kind == "retrieval") {
            out.emplace_back(text, SubQuestionKind::Retrieval);
        } else if (kind == "synthesis") {
            out.emplace_back(text, SubQuestionKind::Synthesis);
        }
    }
    if (out.empty()) throw MalformedVerdict("decompose: no usable sub-questions");
    return out;
}

std::vector<std::string> extract_entities(const std::string& query, const BookIndex& index,
                                          ModelGateway& gateway, const PromptLibrary& prompts,
                                          double theta_link, Warnings* warnings) {
    const RenderedPrompt prompt = prompts.render("query_extract", {{"query", query}}, query);
    const std::string response = gateway.complete(prompt);

    std::vector<std::string> mentions;
    try {
        const std::string payload = extract_json_payload(response);
        if (!payload.empty()) {
            const nlohmann::json doc = nlohmann::json::parse(payload);
            const auto push_mention = [&](const nlohmann::json& jm) {
                if (jm.is_object() && jm.contains("entity_name") &&
                    jm["entity_name"].is_string())
                    mentions.push_back(jm["entity_name"].get<std::string>());
            };
            if (doc.is_array()) {
                for (const auto& jm : doc) push_mention(jm);
            } else if (doc.is_object() && doc.contains("entities") &&
                       doc["entities"].is_array()) {
                for (const auto& jm : doc["entities"]) push_mention(jm);
            } else {
                push_mention(doc);
            }
        }
    } catch (const nlohmann::json::exception&) {
        // fall through: unparsable extraction behaves like "no mentions"
    }

    // normalized name -> entity ids (id order, via the entity map)
    std::map<std::string, std::vector<std::string>> by_name;
    for (const auto& [id, e] : index.graph.entities)
        by_name[normalize_name(e.name)].push_back(id);

    std::vector<std::string> linked;
    std::set<std::string> seen;
    for (const std::string& mention : mentions) {
        const std::string key = normalize_name(mention);
        if (key.empty()) continue;
        auto it = by_name.find(key);
        if (it != by_name.end()) {
            for (const std::string& id : it->second)
                if (seen.insert(id).second) linked.push_back(id);
            continue;
        }
        if (index.store.size() > 0) {
            const auto top = index.store.nearest(gateway.embed(mention), 1);
            if (!top.empty() && top.front().similarity >= theta_link) {
                if (seen.insert(top.front().id).second) linked.push_back(top.front().id);
                continue;
            }
        }
        warn(warnings, "mention '" + mention + "' could not be linked; dropped");
    }
    return linked;
}

// ---- Selectors -------------------------------------------------------------

std::vector<std::string> filter_modal(const BookIndex& index,
                                      const std::vector<std::string>& nodes, NodeType type) {
    std::vector<std::string> out;
    for (const std::string& id : nodes)
        if (index.tree.at(id).type == type) out.push_back(id);
    return out;
}

std::vector<std::string> filter_range_pages(const BookIndex& index,
                                            const std::vector<std::string>& nodes, int first,
                                            int last) {
    if (first < 1 || last < first)
        throw InvalidRange("page range [" + std::to_string(first) + ", " +
                           std::to_string(last) + "] invalid");
    std::vector<std::string> out;
    for (const std::string& id : nodes) {
        const int page = index.tree.at(id).page;
        if (page >= first && page <= last) out.push_back(id);
    }
    return out;
}

std::vector<std::string> filter_range_section(const BookIndex& index,
                                              const std::vector<std::string>& nodes,
                                              const std::string& section_title,
                                              Warnings* warnings) {
    const std::string wanted = normalize_name(section_title);
    if (wanted.empty()) throw InvalidRange("empty section title");
    std::set<std::string> members;
    for (const auto& [id, node] : index.tree.nodes) {
        if (node.type != NodeType::Section || id == index.tree.root) continue;
        if (normalize_name(node.content) == wanted) {
            const auto sub = subtree(index.tree, id);
            members.insert(sub.begin(), sub.end());
        }
    }
    if (members.empty())
        warn(warnings, "no section titled '" + section_title + "'; range filter is empty");
    std::vector<std::string> out;
    for (const std::string& id : nodes)
        if (members.count(id)) out.push_back(id);
    return out;
}

namespace {

// Target section for one origin: the Section ancestor at `depth` when the
// chain has one, the nearest (deepest) ancestor below `depth` otherwise,
// else the shallowest ancestor; the root only when no Section exists.
std::string target_section_for(const DocTree& tree, const std::string& origin, int depth) {
    std::vector<const TreeNode*> chain;  // node-to-root order
    const TreeNode* n = &tree.at(origin);
    while (true) {
        if (n->type == NodeType::Section && n->id != tree.root) chain.push_back(n);
        if (n->parent.empty()) break;
        n = &tree.at(n->parent);
    }
    if (chain.empty()) return tree.root;
    const TreeNode* best_below = nullptr;  // deepest with level <= depth
    for (const TreeNode* s : chain) {
        if (s->level && *s->level == depth) return s->id;
        if (s->level && *s->level < depth &&
            (!best_below || *s->level > *best_below->level))
            best_below = s;
    }
    if (best_below) return best_below->id;
    return chain.back()->id;  // whole chain deeper than `depth`: take the shallowest
}

std::vector<std::string> in_document_order(const DocTree& tree,
                                           const std::set<std::string>& ids) {
    std::vector<std::string> out;
    for (const std::string& id : tree.document_order())
        if (ids.count(id)) out.push_back(id);
    return out;
}

}  // namespace

std::vector<std::string> select_by_entity(const BookIndex& index, const std::string& entity_id,
                                          int depth) {
    const Entity& entity = index.graph.at(entity_id);
    std::set<std::string> targets;
    for (const std::string& origin : entity.origins)
        targets.insert(target_section_for(index.tree, origin, depth));
    std::set<std::string> members;
    for (const std::string& target : targets) {
        const auto sub = subtree(index.tree, target);
        members.insert(sub.begin(), sub.end());
    }
    members.erase(index.tree.root);
    return in_document_order(index.tree, members);
}

std::vector<std::string> select_by_section(const BookIndex& index, const std::string& query,
                                           ModelGateway& gateway, const PromptLibrary& prompts,
                                           int depth, Warnings* warnings) {
    std::vector<const TreeNode*> candidates;
    for (const std::string& id : index.tree.document_order()) {
        const TreeNode& n = index.tree.at(id);
        if (n.type == NodeType::Section && n.level && *n.level == depth)
            candidates.push_back(&n);
    }
    if (candidates.empty()) {
        for (const std::string& id : index.tree.document_order()) {
            const TreeNode& n = index.tree.at(id);
            if (n.type == NodeType::Section) candidates.push_back(&n);
        }
    }
    if (candidates.empty()) {
        // flat tree: the root is the sole candidate
        return index.tree.document_order();
    }

    std::ostringstream titles;
    for (const TreeNode* s : candidates)
        titles << "- " << collapse_whitespace(s->content) << "\n";
    const RenderedPrompt prompt = prompts.render(
        "select_section", {{"query", query}, {"candidates", titles.str()}}, query);
    const std::string response = gateway.complete(prompt);

    std::vector<std::string> picked;
    try {
        const std::string payload = extract_json_payload(response);
        if (payload.empty()) throw MalformedVerdict("select_section: no JSON");
        const nlohmann::json doc = nlohmann::json::parse(payload);
        if (doc.is_object() && doc.contains("sections") && doc["sections"].is_array()) {
            for (const auto& jt : doc["sections"])
                if (jt.is_string()) picked.push_back(jt.get<std::string>());
        } else if (doc.is_array()) {
            for (const auto& jt : doc)
                if (jt.is_string()) picked.push_back(jt.get<std::string>());
        }
    } catch (const nlohmann::json::exception&) {
        throw NoSectionSelected("section selection output unparsable for: " + query);
    }

    std::set<std::string> members;
    for (const std::string& title : picked) {
        const std::string key = normalize_name(title);
        bool matched = false;
        for (const TreeNode* s : candidates) {
            if (normalize_name(s->content) == key) {
                const auto sub = subtree(index.tree, s->id);
                members.insert(sub.begin(), sub.end());
                matched = true;
            }
        }
        if (!matched)
            warn(warnings, "selected section '" + title + "' matches no candidate; ignored");
    }
    if (members.empty())
        throw NoSectionSelected("model selected no known section for: " + query);
    members.erase(index.tree.root);
    return in_document_order(index.tree, members);
}

// ---- Reasoners -------------------------------------------------------------

std::map<std::string, double> graph_reasoning(const BookIndex& index,
                                              const std::vector<std::string>& start_entities,
                                              const std::vector<std::string>& scope,
                                              const PageRankOptions& options,
                                              Warnings* warnings) {
    if (scope.empty()) throw Error("graph_reasoning: empty scope");
    const std::set<std::string> scope_set(scope.begin(), scope.end());

    // subgraph induced by entities with at least one origin in scope
    std::vector<std::string> vertex_ids;
    std::map<std::string, std::size_t> vertex_index;
    for (const auto& [id, e] : index.graph.entities) {
        const bool in_scope = std::any_of(e.origins.begin(), e.origins.end(),
                                          [&](const std::string& o) { return scope_set.count(o); });
        if (in_scope) {
            vertex_index[id] = vertex_ids.size();
            vertex_ids.push_back(id);
        }
    }

    std::map<std::string, double> scores;
    for (const std::string& id : scope) scores[id] = 0.0;
    if (vertex_ids.empty()) {
        warn(warnings, "graph_reasoning: no entities originate in scope; scores are zero");
        return scores;
    }

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const Relation& r : index.graph.relations) {
        auto s = vertex_index.find(r.source);
        auto t = vertex_index.find(r.target);
        if (s != vertex_index.end() && t != vertex_index.end())
            edges.emplace_back(s->second, t->second);
    }

    std::vector<double> personalization(vertex_ids.size(), 0.0);
    bool any_start = false;
    for (const std::string& id : start_entities) {
        auto it = vertex_index.find(id);
        if (it != vertex_index.end()) {
            personalization[it->second] = 1.0;
            any_start = true;
        }
    }
    if (!any_start) personalization.assign(vertex_ids.size(), 1.0);

    const std::vector<double> importance =
        personalized_pagerank(vertex_ids.size(), edges, personalization, options);

    // S_G = I_G x M restricted to scope
    for (std::size_t i = 0; i < vertex_ids.size(); ++i) {
        const Entity& e = index.graph.at(vertex_ids[i]);
        for (const std::string& origin : e.origins) {
            auto it = scores.find(origin);
            if (it != scores.end()) it->second += importance[i];
        }
    }
    return scores;
}

std::string render_node(const BookIndex& index, const std::string& node_id, std::size_t cap) {
    const TreeNode& n = index.tree.at(node_id);
    std::string text;
    if (n.type == NodeType::Image) {
        if (!n.content.empty()) {
            text = n.content;
        } else if (n.extra.contains("caption") && n.extra["caption"].is_string()) {
            text = n.extra["caption"].get<std::string>();
        } else {
            text = "[image: " + n.id + "]";
        }
    } else {
        text = n.content;
    }
    if (text.size() > cap) text.resize(cap);
    return text;
}

std::map<std::string, double> text_reasoning(const BookIndex& index, const std::string& query,
                                             const std::vector<std::string>& scope,
                                             ModelGateway& gateway, std::size_t render_cap) {
    if (scope.empty()) throw Error("text_reasoning: empty scope");
    std::vector<std::string> rendered;
    rendered.reserve(scope.size());
    for (const std::string& id : scope) rendered.push_back(render_node(index, id, render_cap));
    const std::vector<double> raw = gateway.rerank(query, rendered);
    if (raw.size() != scope.size())
        throw GatewayError("rerank returned wrong number of scores");
    std::map<std::string, double> scores;
    for (std::size_t i = 0; i < scope.size(); ++i) scores[scope[i]] = raw[i];
    return scores;
}

RetrievalSet skyline_ranker(const std::vector<ScoredNode>& points) {
    std::vector<SkylinePoint> input;
    input.reserve(points.size());
    for (const ScoredNode& p : points) {
        if (!p.s_graph || !p.s_text)
            throw MissingScore("node " + p.id + " is missing a score dimension");
        input.push_back(SkylinePoint{p.id, *p.s_graph, *p.s_text});
    }
    RetrievalSet out;
    for (const SkylinePoint& p : skyline(std::move(input)))
        out.nodes.push_back(ScoredNode{p.id, p.s_graph, p.s_text});
    return out;
}

// ---- Synthesizers ----------------------------------------------------------

namespace {

std::string render_evidence(const BookIndex& index, const std::vector<std::string>& nodes,
                            std::size_t render_cap) {
    std::ostringstream out;
    for (const std::string& id : nodes)
        out << "[" << id << "] " << render_node(index, id, render_cap) << "\n";
    return out.str();
}

}  // namespace

std::vector<SubAnswer> map_synthesize(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& items,
    const BookIndex& index, ModelGateway& gateway, const PromptLibrary& prompts,
    std::size_t render_cap) {
    std::vector<SubAnswer> out;
    for (const auto& [question, evidence] : items) {
        const RenderedPrompt prompt = prompts.render(
            "map",
            {{"question", question}, {"evidence", render_evidence(index, evidence, render_cap)}},
            question);
        SubAnswer sa;
        sa.question = question;
        sa.answer = gateway.complete(prompt);
        sa.evidence = evidence;
        out.push_back(std::move(sa));
    }
    return out;
}

std::string reduce_synthesize(const std::string& query, const std::vector<SubAnswer>& parts,
                              const std::vector<std::string>& instructions,
                              ModelGateway& gateway, const PromptLibrary& prompts) {
    if (parts.empty()) throw Error("reduce: no parts to synthesize");
    std::ostringstream rendered;
    for (const SubAnswer& p : parts) {
        rendered << "Q: " << p.question << "\n";
        if (p.failed) {
            rendered << "A: [sub-question failed: " << p.answer << "]\n";
        } else {
            rendered << "A: " << p.answer << "\n";
        }
    }
    std::string instruction_text;
    for (const std::string& s : instructions) {
        if (!instruction_text.empty()) instruction_text += " ";
        instruction_text += s;
    }
    const RenderedPrompt prompt = prompts.render("reduce",
                                                 {{"query", query},
                                                  {"parts", rendered.str()},
                                                  {"instructions", instruction_text}},
                                                 query);
    return gateway.complete(prompt);
}

std::string reduce_over_nodes(const std::string& query, const std::vector<std::string>& nodes,
                              const BookIndex& index, ModelGateway& gateway,
                              const PromptLibrary& prompts, std::size_t render_cap) {
    if (nodes.empty()) throw Error("reduce: no evidence nodes");
    const RenderedPrompt prompt =
        prompts.render("reduce",
                       {{"query", query},
                        {"parts", render_evidence(index, nodes, render_cap)},
                        {"instructions", ""}},
                       query);
    return gateway.complete(prompt);
}

// ---- Executor --------------------------------------------------------------

namespace {

class StepTimer {
public:
    StepTimer(Trace& trace, std::string op, std::size_t input_size)
        : trace_(trace), start_(std::chrono::steady_clock::now()) {
        step_.op = std::move(op);
        step_.input_size = input_size;
        usage_before_ = ModelGateway::thread_usage();
    }

    void finish(std::size_t output_size) {
        step_.output_size = output_size;
        const auto now = std::chrono::steady_clock::now();
        step_.duration_ms =
            std::chrono::duration<double, std::milli>(now - start_).count();
        const UsageSnapshot after = ModelGateway::thread_usage();
        step_.tokens = after.total_tokens() - usage_before_.total_tokens();
        trace_.steps.push_back(step_);
    }

private:
    Trace& trace_;
    TraceStep step_;
    std::chrono::steady_clock::time_point start_;
    UsageSnapshot usage_before_;
};

struct PipelineOutcome {
    std::vector<std::string> scope;
    RetrievalSet retained;
};

int depth_param(const OperatorCall& step) {
    if (step.params.contains("depth") && step.params["depth"].is_number_integer())
        return step.params["depth"].get<int>();
    return 1;
}

// Shared by top-level single-hop plans and embedded multi-hop sub-plans:
// Extract -> Select -> (Graph || Text) -> Skyline.
PipelineOutcome run_retrieval_pipeline(const QueryPlan& plan, const BookIndex& index,
                                       ModelGateway& gateway, const PromptLibrary& prompts,
                                       const ExecOptions& options, Trace& trace,
                                       Warnings* warnings) {
    const std::size_t n_total = index.tree.document_order().size();
    const std::string& query = plan.query;

    StepTimer extract_timer(trace, "Extract", n_total);
    const std::vector<std::string> linked =
        extract_entities(query, index, gateway, prompts, options.theta_link, warnings);
    extract_timer.finish(linked.size());

    const int depth = depth_param(plan.steps[1]);
    std::vector<std::string> scope;
    if (!linked.empty()) {
        StepTimer select_timer(trace, "Select_by_Entity", n_total);
        std::set<std::string> merged;
        for (const std::string& entity_id : linked) {
            const auto part = select_by_entity(index, entity_id, depth);
            merged.insert(part.begin(), part.end());
        }
        for (const std::string& id : index.tree.document_order())
            if (merged.count(id)) scope.push_back(id);
        select_timer.finish(scope.size());
    } else {
        StepTimer select_timer(trace, "Select_by_Section", n_total);
        scope = select_by_section(index, query, gateway, prompts, depth, warnings);
        select_timer.finish(scope.size());
    }

    // Graph and Text score the same selection independently; running them
    // in sequence keeps the trace deterministic.
    StepTimer graph_timer(trace, "Graph_Reasoning", scope.size());
    const auto s_graph = graph_reasoning(index, linked, scope, options.pagerank, warnings);
    graph_timer.finish(scope.size());

    StepTimer text_timer(trace, "Text_Reasoning", scope.size());
    const auto s_text = text_reasoning(index, query, scope, gateway, options.render_cap);
    text_timer.finish(scope.size());

    StepTimer skyline_timer(trace, "Skyline_Ranker", scope.size());
    std::vector<ScoredNode> points;
    points.reserve(scope.size());
    for (const std::string& id : scope)
        points.push_back(ScoredNode{id, s_graph.at(id), s_text.at(id)});
    PipelineOutcome out;
    out.scope = scope;
    out.retained = skyline_ranker(points);
    skyline_timer.finish(out.retained.nodes.size());

    trace.records.push_back(
        TraceRecord{query, n_total, scope.size(), out.retained.nodes.size()});
    return out;
}

std::vector<std::string> retained_ids(const RetrievalSet& set) {
    std::vector<std::string> ids;
    ids.reserve(set.nodes.size());
    for (const ScoredNode& n : set.nodes) ids.push_back(n.id);
    return ids;
}

ExecutionResult execute_single_hop(const QueryPlan& plan, const BookIndex& index,
                                   ModelGateway& gateway, const PromptLibrary& prompts,
                                   const ExecOptions& options) {
    ExecutionResult result;
    const PipelineOutcome pipeline = run_retrieval_pipeline(plan, index, gateway, prompts,
                                                            options, result.trace,
                                                            &result.warnings);
    result.retrieved = pipeline.retained;

    StepTimer reduce_timer(result.trace, "Reduce", result.retrieved.nodes.size());
    result.answer = reduce_over_nodes(plan.query, retained_ids(result.retrieved), index,
                                      gateway, prompts, options.render_cap);
    reduce_timer.finish(1);
    return result;
}

ExecutionResult execute_multi_hop(const QueryPlan& plan, const BookIndex& index,
                                  ModelGateway& gateway, const PromptLibrary& prompts,
                                  const ExecOptions& options) {
    ExecutionResult result;

    const auto& decompose_step = plan.steps.front();
    const std::size_t sub_total =
        decompose_step.params.contains("sub_questions")
            ? decompose_step.params["sub_questions"].size()
            : 0;
    StepTimer decompose_timer(result.trace, "Decompose", 1);
    decompose_timer.finish(sub_total);  // bound at plan time

    struct SubRun {
        std::string question;
        std::vector<std::string> retained;
        bool failed = false;
        std::string failure;
    };
    std::vector<SubRun> runs;
    std::set<std::string> union_ids;

    for (std::size_t i = 1; i + 2 < plan.steps.size(); ++i) {
        const QueryPlan& sub_plan = plan.steps[i].sub_plans.front();
        SubRun run;
        run.question = sub_plan.query;
        try {
            const PipelineOutcome out = run_retrieval_pipeline(
                sub_plan, index, gateway, prompts, options, result.trace, &result.warnings);
            run.retained = retained_ids(out.retained);
            for (const ScoredNode& n : out.retained.nodes) {
                if (union_ids.insert(n.id).second) result.retrieved.nodes.push_back(n);
            }
        } catch (const Error& e) {
            run.failed = true;
            run.failure = e.what();
            warn(&result.warnings,
                 "sub-question '" + run.question + "' failed: " + e.what());
        }
        runs.push_back(std::move(run));
    }

    StepTimer map_timer(result.trace, "Map", runs.size());
    std::vector<std::pair<std::string, std::vector<std::string>>> items;
    for (const SubRun& run : runs)
        if (!run.failed) items.emplace_back(run.question, run.retained);
    std::vector<SubAnswer> sub_answers =
        map_synthesize(items, index, gateway, prompts, options.render_cap);
    // splice failed runs back in plan order, marked for the reducer
    std::vector<SubAnswer> parts;
    std::size_t next_ok = 0;
    for (const SubRun& run : runs) {
        if (run.failed) {
            parts.push_back(SubAnswer{run.question, run.failure, {}, true});
        } else {
            parts.push_back(std::move(sub_answers[next_ok++]));
        }
    }
    map_timer.finish(parts.size());

    std::vector<std::string> instructions;
    const auto& reduce_params = plan.steps.back().params;
    if (reduce_params.contains("synthesis_instructions"))
        for (const auto& ji : reduce_params["synthesis_instructions"])
            instructions.push_back(ji.get<std::string>());

    StepTimer reduce_timer(result.trace, "Reduce", parts.size());
    result.answer = reduce_synthesize(plan.query, parts, instructions, gateway, prompts);
    reduce_timer.finish(1);
    return result;
}

ExecutionResult execute_global(const QueryPlan& plan, const BookIndex& index,
                               ModelGateway& gateway, const PromptLibrary& prompts,
                               const ExecOptions& options) {
    ExecutionResult result;
    std::vector<std::string> nodes = index.tree.document_order();
    const std::size_t n_total = nodes.size();

    for (std::size_t i = 0; i + 2 < plan.steps.size(); ++i) {
        const OperatorCall& step = plan.steps[i];
        StepTimer timer(result.trace, step.op, nodes.size());
        if (step.op == "Filter_Modal") {
            nodes = filter_modal(index, nodes,
                                 parse_node_type(step.params["modal_type"].get<std::string>()));
        } else if (step.params.contains("range")) {
            const auto [first, last] =
                parse_page_range(step.params["range"].get<std::string>());
            nodes = filter_range_pages(index, nodes, first, last);
        } else {
            nodes = filter_range_section(index, nodes,
                                         step.params["section"].get<std::string>(),
                                         &result.warnings);
        }
        timer.finish(nodes.size());
    }

    const AggregateOp operation =
        [&] {
            const std::string op = plan.steps.back().params["operation"].get<std::string>();
            if (op == "COUNT") return AggregateOp::Count;
            if (op == "LIST") return AggregateOp::List;
            if (op == "SUMMARIZE") return AggregateOp::Summarize;
            return AggregateOp::Analyze;
        }();

    for (const std::string& id : nodes)
        result.retrieved.nodes.push_back(ScoredNode{id, std::nullopt, std::nullopt});
    result.trace.records.push_back(TraceRecord{plan.query, n_total, nodes.size(), nodes.size()});

    std::vector<SubAnswer> parts;
    StepTimer map_timer(result.trace, "Map",
                        operation == AggregateOp::Summarize || operation == AggregateOp::Analyze
                            ? nodes.size()
                            : 0);
    if (operation == AggregateOp::Summarize || operation == AggregateOp::Analyze) {
        std::vector<std::pair<std::string, std::vector<std::string>>> items;
        for (const std::string& id : nodes)
            items.emplace_back(plan.query, std::vector<std::string>{id});
        parts = map_synthesize(items, index, gateway, prompts, options.render_cap);
    }
    map_timer.finish(parts.size());

    StepTimer reduce_timer(result.trace, "Reduce",
                           parts.empty() ? nodes.size() : parts.size());
    switch (operation) {
        case AggregateOp::Count:
            // exact arithmetic; no model call involved
            result.answer = "Based on my analysis of the document, I found " +
                            std::to_string(nodes.size()) + " items that answer the question.";
            break;
        case AggregateOp::List: {
            std::ostringstream out;
            out << "Based on my analysis of the document, I found " << nodes.size()
                << " items:";
            for (const std::string& id : nodes)
                out << "\n- " << id << ": " << render_node(index, id, 80);
            result.answer = out.str();
            break;
        }
        case AggregateOp::Summarize:
        case AggregateOp::Analyze: {
            if (parts.empty()) {
                result.answer =
                    "Based on my analysis of the document, I found 0 items that answer the "
                    "question.";
            } else {
                result.answer = reduce_synthesize(plan.query, parts, {}, gateway, prompts);
            }
            break;
        }
    }
    reduce_timer.finish(1);
    return result;
}

}  // namespace

ExecutionResult execute(const QueryPlan& plan, const BookIndex& index, ModelGateway& gateway,
                        const ExecOptions& options) {
    validate_plan(plan);
    static const PromptLibrary default_prompts;
    const PromptLibrary& prompts = options.prompts ? *options.prompts : default_prompts;
    switch (plan.category) {
        case QueryCategory::SingleHop:
            return execute_single_hop(plan, index, gateway, prompts, options);
        case QueryCategory::MultiHop:
            return execute_multi_hop(plan, index, gateway, prompts, options);
        case QueryCategory::Global:
            return execute_global(plan, index, gateway, prompts, options);
    }
    throw Error("execute: unknown plan category");
}

nlohmann::json Trace::to_json(bool include_timings) const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const TraceStep& s : steps) {
        nlohmann::json j;
        j["op"] = s.op;
        j["input_size"] = s.input_size;
        j["output_size"] = s.output_size;
        j["tokens"] = s.tokens;
        if (include_timings) j["duration_ms"] = s.duration_ms;
        steps_json.push_back(std::move(j));
    }
    nlohmann::json records_json = nlohmann::json::array();
    for (const TraceRecord& r : records) {
        records_json.push_back({{"label", r.label},
                                {"n_total", r.n_total},
                                {"n_selected", r.n_selected},
                                {"n_retained", r.n_retained}});
    }
    nlohmann::json out;
    out["steps"] = std::move(steps_json);
    out["records"] = std::move(records_json);
    return out;
}

}  // namespace bookrag
