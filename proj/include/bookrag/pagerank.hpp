#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bookrag {

struct PageRankOptions {
    double damping = 0.85;
    double tolerance = 1e-8;  // L1 change between iterations
    int max_iterations = 200;
};

// Personalized PageRank by power iteration over an undirected unit-weight
// graph on nodes 0..n-1 (parallel edges sum their weight). The
// personalization vector is normalized internally; an all-zero vector means
// uniform restart. Mass stranded on degree-0 nodes is redistributed to the
// personalization vector, so the result always sums to 1.
std::vector<double> personalized_pagerank(std::size_t n,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                          std::vector<double> personalization,
                                          const PageRankOptions& options = {});

}  // namespace bookrag
