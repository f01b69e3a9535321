#include <cmath>

#include "markerforge/detector.hpp"

namespace markerforge {

const char* kind_name(MarkerKind kind) {
    switch (kind) {
        case MarkerKind::Background: return "background";
        case MarkerKind::Artcode: return "artcode";
        case MarkerKind::GridTag: return "gridtag";
    }
    return "?";
}

FeatureVector extract_features(const PixelGrid& grid, const Box& box) {
    if (clip(box, grid.width, grid.height) != box || box.area() < 32 * 32)
        throw std::invalid_argument("feature box must lie within the image, area >= 32x32");

    const PixelGrid window = crop(grid, box);
    const BinaryImage bin = adaptive_threshold(window);
    const LabelMap labels = label_components(bin);
    const RegionAdjacencyTree tree = build_rat(labels);

    const double area = static_cast<double>(box.area());
    const double kilopixels = area / 1000.0;

    FeatureVector f;

    // Global darkness fraction: a window deep inside a solid blob must still
    // read as fully ink, which the locally-adaptive mask cannot express.
    std::int64_t inkPixels = 0;
    for (std::uint8_t v : window.luma) inkPixels += v < 128 ? 1 : 0;
    f.values[0] = inkPixels / area;

    f.values[1] = labels.componentCount / kilopixels;

    int inkComponents = 0;
    std::int64_t holes = 0;
    int childless = 0;
    int maxDepth = 0;
    int deepNodes = 0;
    for (const RegionNode& node : tree.nodes) {
        if (tree.virtualRoot && node.id == tree.rootId) continue;
        if (node.polarity == Polarity::Ink) {
            ++inkComponents;
            holes += static_cast<std::int64_t>(node.childIds.size());
        }
        if (node.childIds.empty()) ++childless;
        const int depth = tree.depth(node.id);
        maxDepth = std::max(maxDepth, depth);
        if (depth >= 3) ++deepNodes;
    }
    f.values[2] = inkComponents > 0 ? static_cast<double>(holes) / inkComponents : 0.0;
    f.values[3] = static_cast<double>(childless) / labels.componentCount;
    f.values[4] = std::min(1.0, maxDepth / 5.0);
    f.values[5] = deepNodes / kilopixels;

    // Central differences with clamped coordinates; |grad| > 24 counts as edge.
    std::int64_t edges = 0;
    std::int64_t lumaSum = 0, lumaSq = 0;
    for (int y = 0; y < window.height; ++y) {
        const int yl = std::max(0, y - 1), yh = std::min(window.height - 1, y + 1);
        for (int x = 0; x < window.width; ++x) {
            const int xl = std::max(0, x - 1), xh = std::min(window.width - 1, x + 1);
            const int gx = window.at(xh, y) - window.at(xl, y);
            const int gy = window.at(x, yh) - window.at(x, yl);
            if (gx * gx + gy * gy > 48 * 48) ++edges; // (|g|/2)^2 > 24^2
            const int v = window.at(x, y);
            lumaSum += v;
            lumaSq += static_cast<std::int64_t>(v) * v;
        }
    }
    f.values[6] = edges / area;
    const double mean = lumaSum / area;
    f.values[7] = (lumaSq / area - mean * mean) / (128.0 * 128.0);
    if (f.values[7] < 0) f.values[7] = 0; // guard rounding on uniform input
    return f;
}

} // namespace markerforge
