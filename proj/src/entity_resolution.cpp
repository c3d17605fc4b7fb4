#include "bookrag/entity_resolution.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bookrag {

namespace {

void validate_config(const ResolutionConfig& cfg) {
    if (cfg.top_k < 1) throw Error("resolution: top_k must be >= 1");
    if (!(cfg.g > 0.0 && cfg.g <= 1.0)) throw Error("resolution: g must be in (0, 1]");
    if (cfg.tau_min < 0.0) throw Error("resolution: tau_min must be >= 0");
}

// Adjudication among the selected candidates; returns the chosen entity id
// or empty for "no match".
std::string adjudicate(const Entity& v_n, const std::vector<std::string>& selected,
                       const KnowledgeGraph& graph, ModelGateway& gateway,
                       const ResolutionConfig& cfg, const PromptLibrary& prompts,
                       Warnings* warnings) {
    std::ostringstream candidates;
    std::ostringstream id_list;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        candidates << i << ": " << embedding_input(graph.at(selected[i]), cfg.embed_char_budget)
                   << "\n";
        if (i > 0) id_list << ",";
        id_list << selected[i];
    }
    const std::string new_entity = embedding_input(v_n, cfg.embed_char_budget);
    const RenderedPrompt prompt = prompts.render(
        "er_adjudicate", {{"new_entity", new_entity}, {"candidates", candidates.str()}},
        normalize_name(v_n.name) + "|" + id_list.str());
    const std::string response = gateway.complete(prompt);

    long long select = -1;
    bool parsed = false;
    try {
        const std::string payload = extract_json_payload(response);
        if (!payload.empty()) {
            const nlohmann::json doc = nlohmann::json::parse(payload);
            if (doc.contains("select_id")) {
                if (doc["select_id"].is_number_integer()) {
                    select = doc["select_id"].get<long long>();
                    parsed = true;
                } else if (doc["select_id"].is_string()) {
                    select = std::stoll(doc["select_id"].get<std::string>());
                    parsed = true;
                }
            }
        } else {
            // tolerate a bare integer reply
            const std::string t = trim(response);
            if (!t.empty() &&
                t.find_first_not_of("-0123456789") == std::string::npos) {
                select = std::stoll(t);
                parsed = true;
            }
        }
    } catch (const std::exception&) {
        parsed = false;
    }

    if (!parsed) {
        warn(warnings, "adjudication for '" + v_n.name +
                           "' unparsable; treating as no-match");
        return {};
    }
    if (select < 0) return {};
    if (static_cast<std::size_t>(select) >= selected.size()) {
        warn(warnings, "adjudication for '" + v_n.name + "' selected out-of-range id " +
                           std::to_string(select) + "; treating as no-match");
        return {};
    }
    return selected[static_cast<std::size_t>(select)];
}

}  // namespace

ResolutionOutcome resolve(Entity v_n, VectorStore& store, KnowledgeGraph& graph,
                          ModelGateway& gateway, const ResolutionConfig& cfg,
                          const PromptLibrary& prompts, Warnings* warnings) {
    validate_config(cfg);
    if (v_n.embedding.size() != store.dim())
        throw DimensionMismatch("resolve: entity embedding dimension mismatch");
    if (v_n.id.empty()) throw Error("resolve: entity has no id");
    if (graph.has(v_n.id)) throw Error("resolve: entity id already in graph: " + v_n.id);

    ResolutionOutcome outcome;
    outcome.canonical = v_n.id;

    const auto add_as_new = [&](Entity e) {
        std::vector<double> embedding = e.embedding;
        const std::string id = e.id;
        graph.add_entity(std::move(e));
        store.add(id, std::move(embedding));
        outcome.decision = ResolutionDecision::AddedNew;
        outcome.canonical = id;
    };

    const auto nearest = store.nearest(v_n.embedding, cfg.top_k);
    if (nearest.empty()) {
        add_as_new(std::move(v_n));
        return outcome;
    }

    std::vector<std::string> texts;
    texts.reserve(nearest.size());
    for (const auto& c : nearest)
        texts.push_back(embedding_input(graph.at(c.id), cfg.embed_char_budget));
    const std::vector<double> scores =
        gateway.rerank(embedding_input(v_n, cfg.embed_char_budget), texts);
    if (scores.size() != nearest.size())
        throw GatewayError("rerank returned " + std::to_string(scores.size()) +
                           " scores for " + std::to_string(nearest.size()) + " candidates");

    outcome.candidates.reserve(nearest.size());
    for (std::size_t i = 0; i < nearest.size(); ++i)
        outcome.candidates.push_back(ScoredCandidate{nearest[i].id, scores[i]});
    std::sort(outcome.candidates.begin(), outcome.candidates.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.id < b.id;
              });

    if (cfg.tau_min > 0.0 && outcome.candidates.front().score < cfg.tau_min) {
        add_as_new(std::move(v_n));
        return outcome;
    }

    // Gradient selection: extend Sel while the drop from the previous score
    // is gentle (next > previous * g); stop at the first sharp decline.
    outcome.selected.push_back(outcome.candidates.front().id);
    double score = outcome.candidates.front().score;
    for (std::size_t i = 1; i < outcome.candidates.size(); ++i) {
        if (outcome.candidates[i].score > score * cfg.g) {
            outcome.selected.push_back(outcome.candidates[i].id);
            score = outcome.candidates[i].score;
        } else {
            break;
        }
    }

    if (outcome.selected.size() == outcome.candidates.size()) {
        // no gradient: scores lack discriminative power, the entity is new
        add_as_new(std::move(v_n));
        return outcome;
    }

    std::string canonical;
    if (outcome.selected.size() == 1) {
        canonical = outcome.selected.front();
    } else {
        canonical = adjudicate(v_n, outcome.selected, graph, gateway, cfg, prompts, warnings);
        if (canonical.empty()) {
            add_as_new(std::move(v_n));
            return outcome;
        }
    }

    graph.add_entity(v_n);
    merge_entities(graph, v_n.id, canonical);
    Entity& merged = graph.at(canonical);
    merged.embedding = gateway.embed(embedding_input(merged, cfg.embed_char_budget));
    if (merged.embedding.size() != store.dim())
        throw DimensionMismatch("refresh embedding returned wrong dimension");
    store.update(canonical, merged.embedding);

    outcome.decision = ResolutionDecision::Merged;
    outcome.canonical = canonical;
    return outcome;
}

void merge_entities(KnowledgeGraph& graph, const std::string& absorbed,
                    const std::string& canonical) {
    if (absorbed == canonical) throw Error("merge_entities: absorbed equals canonical");
    Entity& from = graph.at(absorbed);
    Entity& into = graph.at(canonical);

    into.origins.insert(from.origins.begin(), from.origins.end());

    // newline-joined, exact duplicate lines dropped, first-seen order kept
    std::set<std::string> seen;
    std::vector<std::string> lines;
    const auto collect = [&](const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (seen.insert(line).second) lines.push_back(line);
        }
    };
    collect(into.description);
    collect(from.description);
    std::string joined;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) joined += "\n";
        joined += lines[i];
    }
    into.description = std::move(joined);

    std::vector<Relation> kept;
    kept.reserve(graph.relations.size());
    for (Relation& r : graph.relations) {
        if (r.source == absorbed) r.source = canonical;
        if (r.target == absorbed) r.target = canonical;
        if (r.source == r.target) continue;  // self-loop created by the remap
        kept.push_back(std::move(r));
    }
    graph.relations = std::move(kept);
    graph.entities.erase(absorbed);
}

}  // namespace bookrag
