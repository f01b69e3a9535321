#include <algorithm>
#include <cmath>

#include "markerforge/detector.hpp"

namespace markerforge {

namespace {

// 0, stride, 2*stride, ... with the final window clamped to the image edge
// so coverage is total.
std::vector<int> window_positions(int imageExtent, int side, int stride) {
    std::vector<int> xs;
    for (int x = 0;; x += stride) {
        if (x + side >= imageExtent) {
            xs.push_back(imageExtent - side);
            break;
        }
        xs.push_back(x);
    }
    return xs;
}

MarkerKind argmax_kind(const std::array<double, 3>& scores) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (scores[k] > scores[best]) best = k;
    return static_cast<MarkerKind>(best);
}

} // namespace

std::vector<CandidateBox> scan_windows(const PixelGrid& grid, const ClassifierModel& model,
                                       const WindowSpec& spec) {
    if (spec.scales.empty() || spec.strideFraction <= 0 || spec.strideFraction > 1)
        throw std::invalid_argument("window spec invalid");
    std::vector<int> scales = spec.scales;
    std::sort(scales.begin(), scales.end());
    for (int side : scales)
        if (side < 32) throw std::invalid_argument("window side must be >= 32");
    if (grid.width < scales.front() || grid.height < scales.front())
        throw ImageTooSmallError("image smaller than the smallest window scale");

    std::vector<CandidateBox> out;
    for (int side : scales) {
        if (side > grid.width || side > grid.height) continue;
        const int stride = std::max(1, static_cast<int>(std::lround(side * spec.strideFraction)));
        const auto ys = window_positions(grid.height, side, stride);
        const auto xs = window_positions(grid.width, side, stride);
        for (int y : ys) {
            for (int x : xs) {
                CandidateBox cand;
                cand.bbox = {x, y, side, side};
                cand.scores = classify(model, extract_features(grid, cand.bbox));
                cand.predictedKind = argmax_kind(cand.scores);
                if (cand.top_non_background() >= spec.scoreThreshold) out.push_back(cand);
            }
        }
    }
    return out;
}

std::vector<CandidateBox> suppress(const std::vector<CandidateBox>& cands, double iouThreshold) {
    std::vector<std::size_t> order(cands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = cands[a].top_non_background(), sb = cands[b].top_non_background();
        if (sa != sb) return sa > sb;
        if (cands[a].bbox.y != cands[b].bbox.y) return cands[a].bbox.y < cands[b].bbox.y;
        if (cands[a].bbox.x != cands[b].bbox.x) return cands[a].bbox.x < cands[b].bbox.x;
        return a < b;
    });

    std::vector<CandidateBox> kept;
    for (std::size_t idx : order) {
        const CandidateBox& cand = cands[idx];
        bool dominated = false;
        for (const CandidateBox& winner : kept) {
            if (winner.predictedKind == cand.predictedKind &&
                iou(winner.bbox, cand.bbox) > iouThreshold) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(cand);
    }
    return kept;
}

PresenceHeatMap accumulate_heatmap(const std::vector<CandidateBox>& cands, int width, int height) {
    PresenceHeatMap map;
    map.width = width;
    map.height = height;
    map.intensity.assign(static_cast<std::size_t>(width) * height, 0.0);
    for (const CandidateBox& cand : cands) {
        const Box b = clip(cand.bbox, width, height);
        const double weight = 1.0 - cand.scores[0];
        for (int y = b.y; y < b.y2(); ++y) {
            double* row = map.intensity.data() + static_cast<std::size_t>(y) * width;
            for (int x = b.x; x < b.x2(); ++x) row[x] += weight;
        }
    }
    const double maxVal = map.intensity.empty()
                              ? 0.0
                              : *std::max_element(map.intensity.begin(), map.intensity.end());
    if (maxVal > 0)
        for (double& v : map.intensity) v /= maxVal;
    return map;
}

RasterImage fuse_overlay(const PixelGrid& grid, const PresenceHeatMap& heat, double alpha) {
    if (grid.width != heat.width || grid.height != heat.height)
        throw DimensionMismatchError("heat map dimensions differ from the image");
    static constexpr double kHighlight[3] = {255.0, 64.0, 0.0};
    RasterImage out;
    out.width = grid.width;
    out.height = grid.height;
    out.channels = 3;
    out.samples.resize(grid.luma.size() * 3);
    for (std::size_t i = 0; i < grid.luma.size(); ++i) {
        const double h = alpha * heat.intensity[i];
        const double g = grid.luma[i];
        for (int c = 0; c < 3; ++c) {
            out.samples[3 * i + c] =
                static_cast<std::uint8_t>(std::lround((1.0 - h) * g + h * kHighlight[c]));
        }
    }
    return out;
}

RasterImage annotate_boxes(const RasterImage& img, const std::vector<Box>& boxes, int thickness) {
    if (img.channels != 3) throw NotRgbError("annotation needs a 3-channel image");
    RasterImage out = img;
    auto paint = [&](const Box& strip) {
        const Box b = clip(strip, out.width, out.height);
        for (int y = b.y; y < b.y2(); ++y) {
            for (int x = b.x; x < b.x2(); ++x) {
                out.at(x, y, 0) = 255;
                out.at(x, y, 1) = 255;
                out.at(x, y, 2) = 0;
            }
        }
    };
    for (const Box& box : boxes) {
        const int t = std::min({thickness, box.w, box.h});
        paint({box.x, box.y, box.w, t});                  // top
        paint({box.x, box.y2() - t, box.w, t});           // bottom
        paint({box.x, box.y, t, box.h});                  // left
        paint({box.x2() - t, box.y, t, box.h});           // right
    }
    return out;
}

} // namespace markerforge
