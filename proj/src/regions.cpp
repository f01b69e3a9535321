#include "markerforge/regions.hpp"

#include <numeric>

namespace markerforge {

int RegionAdjacencyTree::depth(std::int32_t id) const {
    int d = 0;
    for (std::int32_t cur = id; cur >= 0; cur = nodes[static_cast<std::size_t>(cur)].parentId) {
        if (!(virtualRoot && cur == rootId)) ++d;
    }
    return d;
}

BinaryImage adaptive_threshold(const PixelGrid& grid, int windowRadius, int offset) {
    const int w = grid.width, h = grid.height;
    BinaryImage out;
    out.width = w;
    out.height = h;
    out.ink.assign(static_cast<std::size_t>(w) * h, 0);

    // Integral image with a zero top row / left column.
    std::vector<std::uint64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    const int stride = w + 1;
    for (int y = 0; y < h; ++y) {
        std::uint64_t row = 0;
        const std::uint8_t* src = grid.luma.data() + static_cast<std::size_t>(y) * w;
        std::uint64_t* cur = integral.data() + static_cast<std::size_t>(y + 1) * stride + 1;
        const std::uint64_t* above = integral.data() + static_cast<std::size_t>(y) * stride + 1;
        for (int x = 0; x < w; ++x) {
            row += src[x];
            cur[x] = row + above[x];
        }
    }

    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - windowRadius);
        const int y1 = std::min(h - 1, y + windowRadius);
        const std::uint8_t* src = grid.luma.data() + static_cast<std::size_t>(y) * w;
        std::uint8_t* dst = out.ink.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - windowRadius);
            const int x1 = std::min(w - 1, x + windowRadius);
            const std::uint64_t sum = integral[static_cast<std::size_t>(y1 + 1) * stride + x1 + 1]
                                    - integral[static_cast<std::size_t>(y0) * stride + x1 + 1]
                                    - integral[static_cast<std::size_t>(y1 + 1) * stride + x0]
                                    + integral[static_cast<std::size_t>(y0) * stride + x0];
            const std::uint64_t count = static_cast<std::uint64_t>(x1 - x0 + 1) * (y1 - y0 + 1);
            // luma < sum/count - offset, cleared of the division
            dst[x] = (static_cast<std::uint64_t>(src[x] + offset) * count < sum) ? 1 : 0;
        }
    }
    return out;
}

namespace {

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]]; // path halving
        i = parent[i];
    }
    return i;
}

void unite(std::vector<std::int32_t>& parent, std::int32_t a, std::int32_t b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

} // namespace

LabelMap label_components(const BinaryImage& bin) {
    const int w = bin.width, h = bin.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    // Two-pass union-find. First pass links each pixel to already-scanned
    // neighbors of the same polarity: {W,NW,N,NE} for ink (8-connected),
    // {W,N} for paper (4-connected).
    std::vector<std::int32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t i = y * w + x;
            const std::uint8_t v = bin.ink[i];
            if (x > 0 && bin.ink[i - 1] == v) unite(parent, i, i - 1);
            if (y > 0) {
                if (bin.ink[i - w] == v) unite(parent, i, i - w);
                if (v) { // diagonals only join ink
                    if (x > 0 && bin.ink[i - w - 1]) unite(parent, i, i - w - 1);
                    if (x + 1 < w && bin.ink[i - w + 1]) unite(parent, i, i - w + 1);
                }
            }
        }
    }

    LabelMap map;
    map.width = w;
    map.height = h;
    map.label.resize(n);
    std::vector<std::int32_t> final_label(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t root = find_root(parent, static_cast<std::int32_t>(i));
        if (final_label[root] < 0) {
            final_label[root] = map.componentCount++;
            map.polarity.push_back(bin.ink[i] ? Polarity::Ink : Polarity::Paper);
        }
        map.label[i] = final_label[root];
    }
    return map;
}

RegionAdjacencyTree build_rat(const LabelMap& labels) {
    const int w = labels.width, h = labels.height;
    const int count = labels.componentCount;

    RegionAdjacencyTree tree;
    tree.nodes.resize(count);
    std::vector<std::uint8_t> touchesBorder(count, 0);
    std::vector<std::int32_t> firstPixel(count, -1); // raster index of topmost-leftmost pixel

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t id = labels.label[static_cast<std::size_t>(y) * w + x];
            RegionNode& node = tree.nodes[id];
            if (firstPixel[id] < 0) {
                firstPixel[id] = y * w + x;
                node.id = id;
                node.polarity = labels.polarity[id];
                node.bbox = {x, y, 1, 1};
            } else {
                if (x < node.bbox.x) { node.bbox.w += node.bbox.x - x; node.bbox.x = x; }
                if (x >= node.bbox.x2()) node.bbox.w = x - node.bbox.x + 1;
                if (y >= node.bbox.y2()) node.bbox.h = y - node.bbox.y + 1;
            }
            ++node.area;
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) touchesBorder[id] = 1;
        }
    }

    std::vector<std::int32_t> borderRegions;
    for (std::int32_t id = 0; id < count; ++id)
        if (touchesBorder[id]) borderRegions.push_back(id);

    if (borderRegions.size() == 1) {
        tree.rootId = borderRegions.front();
    } else {
        RegionNode root;
        root.id = count;
        root.polarity = Polarity::Paper;
        root.area = 0;
        root.bbox = {0, 0, w, h};
        tree.nodes.push_back(root);
        tree.rootId = count;
        tree.virtualRoot = true;
    }

    for (std::int32_t id = 0; id < count; ++id) {
        if (id == tree.rootId) continue;
        RegionNode& node = tree.nodes[id];
        if (touchesBorder[id]) {
            node.parentId = tree.rootId;
        } else {
            // The pixel above the topmost-leftmost pixel lies in the region
            // immediately enclosing this one (complementary connectivity
            // keeps the outer contour's neighborhood in a single region).
            const std::int32_t p = firstPixel[id];
            node.parentId = labels.label[static_cast<std::size_t>(p) - w];
        }
        tree.nodes[node.parentId].childIds.push_back(id);
    }
    return tree;
}

} // namespace markerforge
