#pragma once

#include <cstdint>
#include <vector>

#include "markerforge/geometry.hpp"
#include "markerforge/image.hpp"

namespace markerforge {

enum class Polarity : std::uint8_t { Paper = 0, Ink = 1 };

// Dense connected-component labeling. Ink components are 8-connected and
// paper components 4-connected; the complementary rule keeps a ring and its
// hole from being connected and disconnected at the same time.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> label;     // per pixel, dense in [0, componentCount)
    std::vector<Polarity> polarity;      // per label
    int componentCount = 0;

    std::int32_t at(int x, int y) const { return label[static_cast<std::size_t>(y) * width + x]; }
};

struct RegionNode {
    std::int32_t id = 0;
    std::int32_t parentId = -1; // -1 for the root
    std::vector<std::int32_t> childIds;
    Polarity polarity = Polarity::Paper;
    std::int64_t area = 0;
    Box bbox;
};

// Containment hierarchy of regions: each node's parent is the region that
// immediately encloses it. When several regions touch the image border they
// hang off a virtual paper root (id == nodes.size() - 1, area 0).
struct RegionAdjacencyTree {
    std::vector<RegionNode> nodes;
    std::int32_t rootId = 0;
    bool virtualRoot = false;

    const RegionNode& node(std::int32_t id) const { return nodes[static_cast<std::size_t>(id)]; }
    // Root has depth 1; children of a virtual root also have depth 1.
    int depth(std::int32_t id) const;
};

// Windowed-mean binarization: pixel is ink iff
//   luma(p) < mean(window, clipped at borders) - offset.
// Evaluated in exact integer arithmetic via an integral image, so the result
// is invariant under adding a constant to all luma values.
BinaryImage adaptive_threshold(const PixelGrid& grid, int windowRadius, int offset);

// Scale-adaptive defaults, calibrated against the renderer round-trip.
inline int default_threshold_radius(int width, int height) {
    int r = std::min(width, height) / 16;
    return r < 15 ? 15 : r;
}
constexpr int kDefaultThresholdOffset = 5;

inline BinaryImage adaptive_threshold(const PixelGrid& grid) {
    return adaptive_threshold(grid, default_threshold_radius(grid.width, grid.height),
                              kDefaultThresholdOffset);
}

// Labels assigned in first-encounter raster order starting at 0.
LabelMap label_components(const BinaryImage& bin);

RegionAdjacencyTree build_rat(const LabelMap& labels);

} // namespace markerforge
