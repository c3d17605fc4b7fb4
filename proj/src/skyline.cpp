#include "bookrag/skyline.hpp"

#include <algorithm>

#include "bookrag/common.hpp"

namespace bookrag {

std::vector<SkylinePoint> skyline(std::vector<SkylinePoint> points) {
    if (points.size() <= 1) return points;

    std::sort(points.begin(), points.end(), [](const SkylinePoint& a, const SkylinePoint& b) {
        if (a.s_text != b.s_text) return a.s_text > b.s_text;
        if (a.s_graph != b.s_graph) return a.s_graph > b.s_graph;
        return a.id < b.id;
    });

    // Sweep groups of equal s_text. A point survives iff its s_graph equals
    // the group maximum and strictly exceeds every higher-text group's best.
    std::vector<SkylinePoint> frontier;
    double best_graph_above = 0.0;  // max s_graph among strictly higher s_text
    bool any_above = false;

    std::size_t i = 0;
    while (i < points.size()) {
        std::size_t j = i;
        while (j < points.size() && points[j].s_text == points[i].s_text) ++j;
        const double group_max = points[i].s_graph;  // groups sorted s_graph desc
        if (!any_above || group_max > best_graph_above) {
            for (std::size_t k = i; k < j && points[k].s_graph == group_max; ++k)
                frontier.push_back(points[k]);
            best_graph_above = group_max;
            any_above = true;
        }
        i = j;
    }
    return frontier;
}

std::vector<SkylinePointNd> skyline_nd(std::vector<SkylinePointNd> points) {
    if (points.empty()) return points;
    const std::size_t dims = points.front().scores.size();
    if (dims < 2) throw Error("skyline_nd: at least two criteria required");
    for (const auto& p : points)
        if (p.scores.size() != dims) throw Error("skyline_nd: ragged score vectors");

    const auto dominates = [dims](const SkylinePointNd& a, const SkylinePointNd& b) {
        bool strict = false;
        for (std::size_t d = 0; d < dims; ++d) {
            if (a.scores[d] < b.scores[d]) return false;
            if (a.scores[d] > b.scores[d]) strict = true;
        }
        return strict;
    };

    std::vector<SkylinePointNd> frontier;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points) {
            if (dominates(q, p)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) frontier.push_back(p);
    }
    std::sort(frontier.begin(), frontier.end(),
              [](const SkylinePointNd& a, const SkylinePointNd& b) {
                  if (a.scores != b.scores) return a.scores > b.scores;
                  return a.id < b.id;
              });
    return frontier;
}

}  // namespace bookrag
