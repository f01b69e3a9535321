#pragma once

#include <algorithm>
#include <cstdint>

namespace markerforge {

// Axis-aligned pixel rectangle, (x, y) top-left, half-open extents.
struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
    int x2() const { return x + w; }
    int y2() const { return y + h; }

    bool contains(int px, int py) const {
        return px >= x && px < x2() && py >= y && py < y2();
    }
    bool contains(const Box& o) const {
        return o.x >= x && o.y >= y && o.x2() <= x2() && o.y2() <= y2();
    }

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }

    friend bool operator==(const Box&, const Box&) = default;
};

inline Box intersect(const Box& a, const Box& b) {
    int x1 = std::max(a.x, b.x);
    int y1 = std::max(a.y, b.y);
    int x2 = std::min(a.x2(), b.x2());
    int y2 = std::min(a.y2(), b.y2());
    if (x2 <= x1 || y2 <= y1) return {};
    return {x1, y1, x2 - x1, y2 - y1};
}

inline double iou(const Box& a, const Box& b) {
    std::int64_t inter = intersect(a, b).area();
    std::int64_t uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Clips to [0,0,w,h].
inline Box clip(const Box& b, int w, int h) {
    return intersect(b, Box{0, 0, w, h});
}

// Expands each side by frac of the corresponding extent, then clips.
inline Box pad(const Box& b, double frac, int w, int h) {
    int px = static_cast<int>(b.w * frac + 0.5);
    int py = static_cast<int>(b.h * frac + 0.5);
    return clip(Box{b.x - px, b.y - py, b.w + 2 * px, b.h + 2 * py}, w, h);
}

} // namespace markerforge
