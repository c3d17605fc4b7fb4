#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bookrag/gateway.hpp"
#include "bookrag/graph.hpp"
#include "bookrag/prompts.hpp"
#include "bookrag/tree.hpp"

namespace bookrag {

// Per-node extraction result. Entities carry no graph ids yet; relation
// endpoints reference entities by normalized name until resolution assigns
// canonical ids.
struct NodeExtraction {
    std::vector<Entity> entities;
    std::vector<Relation> relations;
};

// Extracts the node's local subgraph. Text/Table/Formula nodes go through
// the LLM, Image nodes through the VLM (bytes loaded via `image_loader`),
// Section headings become a single SECTION entity without a model call.
//
// For Table/Formula nodes the result is post-processed so that exactly one
// primary typed entity exists and every other entity links to it; Table
// star edges carry kind "ContainedIn".
//
// Throws EmptyExtraction when there is nothing to extract, GatewayError on
// backend failure.
NodeExtraction extract_node_subgraph(
    const TreeNode& node, ModelGateway& gateway, const PromptLibrary& prompts,
    const std::function<std::vector<unsigned char>(const std::string&)>& image_loader = {},
    Warnings* warnings = nullptr);

// Fills e.embedding from the gateway; input string is embedding_input(e).
void embed_entity(Entity& e, ModelGateway& gateway, std::size_t char_budget = 512);

}  // namespace bookrag
