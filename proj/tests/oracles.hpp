#pragma once

// Independent reference implementations used to check the production code.
// These deliberately take different algorithmic routes: labeling by BFS flood
// fill (production uses two-pass union-find) and region parenthood by
// ray-crossing against the traced outer contour polygon (production uses the
// pixel-above rule), cross-checked by border reachability.

#include <deque>
#include <vector>

#include "markerforge/regions.hpp"

namespace oracles {

using markerforge::BinaryImage;
using markerforge::Box;
using markerforge::LabelMap;
using markerforge::Polarity;

// BFS flood fill, labels in first-encounter raster order; ink 8-connected,
// paper 4-connected.
inline LabelMap flood_fill_labels(const BinaryImage& bin) {
    const int w = bin.width, h = bin.height;
    LabelMap map;
    map.width = w;
    map.height = h;
    map.label.assign(static_cast<std::size_t>(w) * h, -1);
    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (map.label[static_cast<std::size_t>(sy) * w + sx] >= 0) continue;
            const std::uint8_t v = bin.ink[static_cast<std::size_t>(sy) * w + sx];
            const int id = map.componentCount++;
            map.polarity.push_back(v ? Polarity::Ink : Polarity::Paper);
            const int neighbors = v ? 8 : 4;
            std::deque<std::pair<int, int>> queue{{sx, sy}};
            map.label[static_cast<std::size_t>(sy) * w + sx] = id;
            while (!queue.empty()) {
                const auto [x, y] = queue.front();
                queue.pop_front();
                for (int n = 0; n < neighbors; ++n) {
                    const int nx = x + dx8[n], ny = y + dy8[n];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
                    if (map.label[idx] >= 0 || bin.ink[idx] != v) continue;
                    map.label[idx] = id;
                    queue.push_back({nx, ny});
                }
            }
        }
    }
    return map;
}

// Outer crack contour of one region as a rectilinear polygon on the corner
// lattice. At checkerboard corners the turn follows the region's
// connectivity: 8-connected ink keeps the diagonal joined (turn left),
// 4-connected paper splits it (turn right).
inline std::vector<std::pair<int, int>> outer_contour(const LabelMap& labels, int regionId) {
    const int w = labels.width, h = labels.height;
    auto inRegion = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && labels.at(x, y) == regionId;
    };
    // topmost-leftmost pixel
    int sx = -1, sy = -1;
    for (int y = 0; y < h && sx < 0; ++y)
        for (int x = 0; x < w; ++x)
            if (labels.at(x, y) == regionId) {
                sx = x;
                sy = y;
                break;
            }
    const bool eightConnected = labels.polarity[regionId] == Polarity::Ink;

    // Directions: 0=E, 1=S, 2=W, 3=N; the region stays on the right.
    static const int stepX[] = {1, 0, -1, 0};
    static const int stepY[] = {0, 1, 0, -1};
    std::vector<std::pair<int, int>> polygon;
    int cx = sx, cy = sy, dir = 0;
    do {
        polygon.push_back({cx, cy});
        const int nx = cx + stepX[dir], ny = cy + stepY[dir];
        // Pixels ahead of the corner we are moving to, relative to travel:
        // right-ahead and left-ahead of direction dir at corner (nx, ny).
        int rx, ry, lx, ly;
        switch (dir) {
            case 0: rx = nx; ry = ny; lx = nx; ly = ny - 1; break;     // E
            case 1: rx = nx - 1; ry = ny; lx = nx; ly = ny; break;     // S
            case 2: rx = nx - 1; ry = ny - 1; lx = nx - 1; ly = ny; break; // W
            default: rx = nx; ry = ny - 1; lx = nx - 1; ly = ny - 1; break; // N
        }
        const bool right = inRegion(rx, ry);
        const bool left = inRegion(lx, ly);
        cx = nx;
        cy = ny;
        if (right && !left) {
            // straight
        } else if (right && left) {
            dir = (dir + 3) % 4; // turn left
        } else if (!right && !left) {
            dir = (dir + 1) % 4; // turn right
        } else {
            dir = eightConnected ? (dir + 3) % 4 : (dir + 1) % 4; // checkerboard
        }
    } while (cx != sx || cy != sy || dir != 0 || polygon.size() < 2);
    polygon.push_back({sx, sy});
    return polygon;
}

// Even-odd test of pixel center (px+0.5, py+0.5) against a rectilinear
// polygon, counting vertical edge crossings of a leftward ray.
inline bool point_in_polygon(const std::vector<std::pair<int, int>>& polygon, int px, int py) {
    int crossings = 0;
    for (std::size_t i = 0; i + 1 < polygon.size(); ++i) {
        const auto [x1, y1] = polygon[i];
        const auto [x2, y2] = polygon[i + 1];
        if (x1 != x2) continue; // horizontal edges never cross the ray
        if (x1 > px) continue;  // ray points left
        const int yLo = std::min(y1, y2), yHi = std::max(y1, y2);
        if (yLo <= py && py < yHi) ++crossings;
    }
    return crossings % 2 == 1;
}

// Does region S enclose region R? Ray-crossing route.
inline bool encloses_ray(const LabelMap& labels, int s, int r) {
    if (s == r) return false;
    int px = -1, py = -1;
    for (int y = 0; y < labels.height && px < 0; ++y)
        for (int x = 0; x < labels.width; ++x)
            if (labels.at(x, y) == r) {
                px = x;
                py = y;
                break;
            }
    return point_in_polygon(outer_contour(labels, s), px, py);
}

// Same question via reachability: R is enclosed iff it cannot be reached
// from the border without stepping on S. The walk uses the connectivity
// complementary to S's polarity.
inline bool encloses_bfs(const LabelMap& labels, int s, int r) {
    if (s == r) return false;
    const int w = labels.width, h = labels.height;
    const int neighbors = labels.polarity[s] == Polarity::Ink ? 4 : 8;
    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    std::vector<std::uint8_t> reached(static_cast<std::size_t>(w) * h, 0);
    std::deque<std::pair<int, int>> queue;
    for (int x = 0; x < w; ++x) {
        for (int y : {0, h - 1}) {
            if (labels.at(x, y) != s && !reached[static_cast<std::size_t>(y) * w + x]) {
                reached[static_cast<std::size_t>(y) * w + x] = 1;
                queue.push_back({x, y});
            }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x : {0, w - 1}) {
            if (labels.at(x, y) != s && !reached[static_cast<std::size_t>(y) * w + x]) {
                reached[static_cast<std::size_t>(y) * w + x] = 1;
                queue.push_back({x, y});
            }
        }
    }
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int n = 0; n < neighbors; ++n) {
            const int nx = x + dx8[n], ny = y + dy8[n];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
            if (reached[idx] || labels.at(nx, ny) == s) continue;
            reached[idx] = 1;
            queue.push_back({nx, ny});
        }
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (labels.at(x, y) == r && reached[static_cast<std::size_t>(y) * w + x]) return false;
    return true;
}

// Expected parent of every region: the smallest-area enclosing region, or
// the root rule for border-touching regions. Returns parent ids indexed by
// region, -1 for the root, count for the virtual root.
inline std::vector<int> expected_parents(const LabelMap& labels) {
    const int w = labels.width, h = labels.height;
    std::vector<std::int64_t> area(labels.componentCount, 0);
    std::vector<std::uint8_t> border(labels.componentCount, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int id = labels.at(x, y);
            ++area[id];
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) border[id] = 1;
        }
    }
    int borderCount = 0, soleBorder = -1;
    for (int id = 0; id < labels.componentCount; ++id) {
        if (border[id]) {
            ++borderCount;
            soleBorder = id;
        }
    }
    const bool virtualRoot = borderCount > 1;

    std::vector<int> parent(labels.componentCount, -1);
    for (int r = 0; r < labels.componentCount; ++r) {
        if (border[r]) {
            parent[r] = virtualRoot ? labels.componentCount : (r == soleBorder ? -1 : soleBorder);
            continue;
        }
        int best = -1;
        for (int s = 0; s < labels.componentCount; ++s) {
            if (s == r) continue;
            if (encloses_ray(labels, s, r) && (best < 0 || area[s] < area[best])) best = s;
        }
        parent[r] = best;
    }
    return parent;
}

} // namespace oracles
