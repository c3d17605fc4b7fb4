#pragma once

#include "bookrag/graph.hpp"

namespace bookrag {

// The four statistics reported for a built graph. Density treats the graph
// as directed: |E| / (|V| * (|V| - 1)), zero for fewer than two vertices.
// Diameter is measured on the undirected largest connected component.
struct GraphStats {
    std::size_t entity_count = 0;
    double density = 0.0;
    std::size_t diameter = 0;
    std::size_t connected_components = 0;
};

GraphStats compute_graph_stats(const KnowledgeGraph& graph);

}  // namespace bookrag
