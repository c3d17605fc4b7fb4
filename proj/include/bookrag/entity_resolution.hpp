#pragma once

#include <string>
#include <vector>

#include "bookrag/gateway.hpp"
#include "bookrag/graph.hpp"
#include "bookrag/prompts.hpp"
#include "bookrag/vector_store.hpp"

namespace bookrag {

struct ResolutionConfig {
    std::size_t top_k = 10;
    double g = 0.6;        // gradient threshold, in (0, 1]
    double tau_min = 0.0;  // absolute rerank floor; 0 disables it
    std::size_t embed_char_budget = 512;
};

enum class ResolutionDecision { AddedNew, Merged };

struct ScoredCandidate {
    std::string id;
    double score;  // rerank score
};

struct ResolutionOutcome {
    ResolutionDecision decision = ResolutionDecision::AddedNew;
    std::string canonical;                    // the surviving entity id
    std::vector<ScoredCandidate> candidates;  // rerank-sorted, descending
    std::vector<std::string> selected;        // Sel: prefix of `candidates`
};

// Incremental merge-or-add for one new entity against the current graph
// and vector store.
//
// Candidates are the top_k nearest store entries; their rerank scores are
// sorted descending and the selection set grows while the next score stays
// above the previous one times g (a gentle drop). Selecting every candidate
// means the scores carried no gradient, so the entity is added as new.
// A single survivor merges directly; several survivors go to the model
// adjudicator, whose -1 answer also falls back to adding a new entity.
//
// On a merge, the canonical entity absorbs origins, description lines and
// relations, its embedding is refreshed, and the store entry is updated.
ResolutionOutcome resolve(Entity v_n, VectorStore& store, KnowledgeGraph& graph,
                          ModelGateway& gateway, const ResolutionConfig& cfg,
                          const PromptLibrary& prompts, Warnings* warnings = nullptr);

// Folds `absorbed` into `canonical`: origins union, exact-line-deduplicated
// description concatenation, relation endpoint remap (self-loops dropped),
// then removes `absorbed`. Both must exist and differ.
void merge_entities(KnowledgeGraph& graph, const std::string& absorbed,
                    const std::string& canonical);

}  // namespace bookrag
