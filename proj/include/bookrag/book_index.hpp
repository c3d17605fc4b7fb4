#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "bookrag/block.hpp"
#include "bookrag/entity_resolution.hpp"
#include "bookrag/gateway.hpp"
#include "bookrag/graph.hpp"
#include "bookrag/prompts.hpp"
#include "bookrag/tree.hpp"
#include "bookrag/vector_store.hpp"

namespace bookrag {

// The assembled index: document tree, entity graph, and the entity-origin
// mapping (stored once, on Entity.origins; the reverse map is derived).
struct BookIndex {
    std::string doc_id;
    DocTree tree;
    KnowledgeGraph graph;
    VectorStore store;

    BookIndex() : store(1) {}
    explicit BookIndex(std::size_t dim) : store(dim) {}
};

struct GtLinkView {
    std::map<std::string, std::set<std::string>> entity_to_nodes;
    std::map<std::string, std::set<std::string>> node_to_entities;
};

struct BuildConfig {
    ResolutionConfig resolution;
    int batch_size = 20;
};

struct BuildStats {
    std::size_t entities_extracted = 0;
    std::size_t merges = 0;
    std::size_t nodes_failed = 0;
    Warnings warnings;
};

// Full pipeline: section filtering, tree assembly, per-node extraction in
// document order, and sequential entity resolution. Nodes whose extraction
// fails contribute nothing; the build completes with warnings.
BookIndex build_index(const DocumentSource& src, ModelGateway& gateway,
                      const BuildConfig& cfg, const PromptLibrary& prompts,
                      BuildStats* stats = nullptr);

GtLinkView gt_link(const BookIndex& index);

// Index directory: manifest.json (format_version, checksums), tree.json,
// graph.json, vectors.bin (little-endian fixed-width doubles).
void save_index(const BookIndex& index, const std::filesystem::path& dir);
BookIndex load_index(const std::filesystem::path& dir);

// Referential closure across tree, graph and store; empty means valid.
std::vector<std::string> validate_index(const BookIndex& index);

}  // namespace bookrag
