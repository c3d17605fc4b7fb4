#include "bookrag/pagerank.hpp"

#include <cmath>
#include <stdexcept>

#include "bookrag/common.hpp"

namespace bookrag {

std::vector<double> personalized_pagerank(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
    std::vector<double> personalization, const PageRankOptions& options) {
    if (n == 0) return {};
    if (personalization.empty()) personalization.assign(n, 1.0);
    if (personalization.size() != n)
        throw Error("pagerank: personalization size mismatch");
    if (!(options.damping > 0.0 && options.damping < 1.0))
        throw Error("pagerank: damping must be in (0, 1)");

    double p_sum = 0.0;
    for (double w : personalization) {
        if (w < 0.0) throw Error("pagerank: negative personalization weight");
        p_sum += w;
    }
    if (p_sum == 0.0) {
        personalization.assign(n, 1.0 / static_cast<double>(n));
    } else {
        for (double& w : personalization) w /= p_sum;
    }

    // weighted adjacency (undirected, parallel edges accumulate)
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    std::vector<double> degree(n, 0.0);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw Error("pagerank: edge endpoint out of range");
        adj[u].emplace_back(v, 1.0);
        degree[u] += 1.0;
        if (u != v) {
            adj[v].emplace_back(u, 1.0);
            degree[v] += 1.0;
        }
    }

    std::vector<double> rank = personalization;
    std::vector<double> next(n, 0.0);
    const double alpha = options.damping;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            if (degree[u] == 0.0) dangling += rank[u];
        }
        for (std::size_t u = 0; u < n; ++u)
            next[u] = (1.0 - alpha + alpha * dangling) * personalization[u];
        for (std::size_t u = 0; u < n; ++u) {
            if (degree[u] == 0.0) continue;
            const double share = alpha * rank[u] / degree[u];
            for (const auto& [v, w] : adj[u]) next[v] += share * w;
        }

        double total = 0.0;
        for (double x : next) total += x;
        if (total > 0.0) {
            for (double& x : next) x /= total;
        }

        double delta = 0.0;
        for (std::size_t u = 0; u < n; ++u) delta += std::abs(next[u] - rank[u]);
        rank.swap(next);
        if (delta <= options.tolerance) break;
    }
    return rank;
}

}  // namespace bookrag
