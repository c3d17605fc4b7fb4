#pragma once

#include <string>
#include <vector>

namespace bookrag {

struct SkylinePoint {
    std::string id;
    double s_graph = 0.0;
    double s_text = 0.0;
};

// Pareto frontier under (s_graph, s_text): a point is dominated when some
// other point is >= on both criteria and > on at least one. Equal score
// pairs never dominate each other, so duplicates are all retained.
// Output order: s_text descending, then s_graph descending, then id.
// Runs in O(n log n).
std::vector<SkylinePoint> skyline(std::vector<SkylinePoint> points);

// General form for k >= 2 criteria. Plans only ever bind two dimensions, so
// this path stays O(k n^2); the two-dimensional sweep above is the hot one.
struct SkylinePointNd {
    std::string id;
    std::vector<double> scores;
};

std::vector<SkylinePointNd> skyline_nd(std::vector<SkylinePointNd> points);

}  // namespace bookrag
