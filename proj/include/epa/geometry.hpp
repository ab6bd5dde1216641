#pragma once

// Small planar polyline utilities: winding numbers, distances, self-intersection.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace epa::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::hypot(p.x - (a.x + s * dx), p.y - (a.y + s * dy));
}

/// Distance from p to a closed polygon's edges.
inline double polygon_distance(const std::vector<Vec2>& poly, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % n]));
    return best;
}

/// Winding number of a closed polygon around p (Sunday's crossing rule).
inline int winding_number(const std::vector<Vec2>& poly, Vec2 p) {
    int wn = 0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        if (a.y <= p.y) {
            if (b.y > p.y && cross(a, b, p) > 0.0) ++wn;
        } else if (b.y <= p.y && cross(a, b, p) < 0.0) {
            --wn;
        }
    }
    return wn;
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(c, d, a), d2 = cross(c, d, b);
    const double d3 = cross(a, b, c), d4 = cross(a, b, d);
    return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
           ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

/// True when no two non-adjacent edges properly cross.
inline bool is_simple(const std::vector<Vec2>& pts, bool closed) {
    const std::size_t n = pts.size();
    const std::size_t edges = closed ? n : n - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        const Vec2 a = pts[i], b = pts[(i + 1) % n];
        for (std::size_t j = i + 2; j < edges; ++j) {
            if (closed && i == 0 && j + 1 == edges) continue;
            if (segments_cross(a, b, pts[j], pts[(j + 1) % n])) return false;
        }
    }
    return true;
}

/// One-sided Hausdorff distance from the vertices of a to the polyline b.
inline double hausdorff_to_polyline(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < b.size(); ++i) best = std::min(best, segment_distance(p, b[i], b[i + 1]));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace epa::geom
