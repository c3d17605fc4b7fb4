#include "bookrag/graph_stats.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

namespace bookrag {

GraphStats compute_graph_stats(const KnowledgeGraph& graph) {
    GraphStats stats;
    stats.entity_count = graph.entities.size();
    if (stats.entity_count == 0) return stats;

    const double v = static_cast<double>(stats.entity_count);
    if (stats.entity_count > 1)
        stats.density = static_cast<double>(graph.relations.size()) / (v * (v - 1.0));

    std::map<std::string, std::size_t> index;
    std::vector<std::string> ids;
    for (const auto& [id, e] : graph.entities) {
        index[id] = ids.size();
        ids.push_back(id);
    }
    std::vector<std::set<std::size_t>> adj(ids.size());
    for (const Relation& r : graph.relations) {
        auto s = index.find(r.source);
        auto t = index.find(r.target);
        if (s == index.end() || t == index.end() || s->second == t->second) continue;
        adj[s->second].insert(t->second);
        adj[t->second].insert(s->second);
    }

    std::vector<int> component(ids.size(), -1);
    std::size_t component_count = 0;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t start = 0; start < ids.size(); ++start) {
        if (component[start] >= 0) continue;
        members.emplace_back();
        std::deque<std::size_t> queue{start};
        component[start] = static_cast<int>(component_count);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            members.back().push_back(u);
            for (std::size_t w : adj[u]) {
                if (component[w] < 0) {
                    component[w] = static_cast<int>(component_count);
                    queue.push_back(w);
                }
            }
        }
        ++component_count;
    }
    stats.connected_components = component_count;

    const auto& largest = *std::max_element(
        members.begin(), members.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });

    // eccentricity scan by BFS from every node of the largest component
    std::size_t diameter = 0;
    for (std::size_t source : largest) {
        std::map<std::size_t, std::size_t> dist{{source, 0}};
        std::deque<std::size_t> queue{source};
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t w : adj[u]) {
                if (!dist.count(w)) {
                    dist[w] = dist[u] + 1;
                    diameter = std::max(diameter, dist[w]);
                    queue.push_back(w);
                }
            }
        }
    }
    stats.diameter = diameter;
    return stats;
}

}  // namespace bookrag
