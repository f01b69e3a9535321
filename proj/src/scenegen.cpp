#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "markerforge/artcode.hpp"
#include "markerforge/gridtag.hpp"
#include "markerforge/rng.hpp"
#include "markerforge/scenegen.hpp"

namespace markerforge {

namespace {

constexpr std::uint8_t kPaper = 235;
constexpr int kCanonicalRenderPx = 512;
constexpr int kStampPad = 3; // paper margin stamped around each marker tile

void validate(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("canvas must be positive");
    for (double f : {spec.lighting.startFactor, spec.lighting.endFactor})
        if (f < 0.3 || f > 1.2) throw std::invalid_argument("lighting factors must be in [0.3, 1.2]");
    for (const Placement& p : spec.placements)
        if (p.heightFraction <= 0 || p.heightFraction > 1)
            throw std::invalid_argument("heightFraction must be in (0, 1]");
}

void paint_clutter(PixelGrid& canvas, double density, Rng& rng) {
    const int count = static_cast<int>(
        std::lround(density * canvas.width * canvas.height / 1000.0));
    for (int i = 0; i < count; ++i) {
        const std::uint8_t shade = static_cast<std::uint8_t>(rng.uniform_int(15, 90));
        const double pick = rng.next_double();
        const int cx = static_cast<int>(rng.uniform_int(0, canvas.width - 1));
        const int cy = static_cast<int>(rng.uniform_int(0, canvas.height - 1));
        if (pick < 0.4) {
            // stroke
            const double len = rng.uniform(8, 40);
            const double ang = rng.uniform(0, std::numbers::pi);
            const double half = rng.uniform(1.0, 2.5);
            const double dx = std::cos(ang) * len / 2, dy = std::sin(ang) * len / 2;
            const int x0 = std::max(0, static_cast<int>(cx - std::abs(dx) - half - 1));
            const int x1 = std::min(canvas.width - 1, static_cast<int>(cx + std::abs(dx) + half + 1));
            const int y0 = std::max(0, static_cast<int>(cy - std::abs(dy) - half - 1));
            const int y1 = std::min(canvas.height - 1, static_cast<int>(cy + std::abs(dy) + half + 1));
            const double len2 = dx * dx + dy * dy;
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    double t = len2 > 0 ? ((x - cx) * dx + (y - cy) * dy) / len2 : 0;
                    t = std::clamp(t, -1.0, 1.0);
                    const double qx = cx + t * dx, qy = cy + t * dy;
                    if (std::hypot(x - qx, y - qy) <= half) canvas.at(x, y) = shade;
                }
            }
        } else if (pick < 0.7) {
            // blob
            const double r = rng.uniform(2, 10);
            for (int y = std::max(0, cy - static_cast<int>(r) - 1);
                 y <= std::min(canvas.height - 1, cy + static_cast<int>(r) + 1); ++y) {
                for (int x = std::max(0, cx - static_cast<int>(r) - 1);
                     x <= std::min(canvas.width - 1, cx + static_cast<int>(r) + 1); ++x) {
                    const double dx = x - cx, dy = y - cy;
                    if (dx * dx + dy * dy <= r * r) canvas.at(x, y) = shade;
                }
            }
        } else {
            // hollow rectangle, a deliberately marker-confusable shape
            const int w = static_cast<int>(rng.uniform_int(12, 48));
            const int h = static_cast<int>(rng.uniform_int(12, 48));
            const int t = static_cast<int>(rng.uniform_int(2, 4));
            const Box outer = clip({cx - w / 2, cy - h / 2, w, h}, canvas.width, canvas.height);
            for (int y = outer.y; y < outer.y2(); ++y) {
                for (int x = outer.x; x < outer.x2(); ++x) {
                    const bool edge = x < outer.x + t || x >= outer.x2() - t || y < outer.y + t ||
                                      y >= outer.y2() - t;
                    if (edge) canvas.at(x, y) = shade;
                }
            }
        }
    }
}

struct MarkerTile {
    PixelGrid pixels;
    Box inkBox; // tile-relative ink extent
};

MarkerTile make_marker_tile(const Placement& p, int targetPx, std::uint64_t renderSeed) {
    MarkerTile tile;
    if (p.kind == MarkerKind::Artcode) {
        const ArtcodeDescriptor d = parse_code(p.payload);
        const int renderPx = std::max(kCanonicalRenderPx, targetPx);
        tile.pixels = resize_area(render_artcode(d, renderPx, renderSeed), targetPx, targetPx);
        int x0 = targetPx, y0 = targetPx, x1 = -1, y1 = -1;
        for (int y = 0; y < targetPx; ++y) {
            for (int x = 0; x < targetPx; ++x) {
                if (tile.pixels.at(x, y) != kPaper) {
                    x0 = std::min(x0, x);
                    y0 = std::min(y0, y);
                    x1 = std::max(x1, x);
                    y1 = std::max(y1, y);
                }
            }
        }
        tile.inkBox = x1 >= 0 ? Box{x0, y0, x1 - x0 + 1, y1 - y0 + 1} : Box{0, 0, targetPx, targetPx};
    } else if (p.kind == MarkerKind::GridTag) {
        GridTagPayload payload{static_cast<std::uint16_t>(std::stoul(p.payload, nullptr, 16))};
        const int modulePx = std::max(2, targetPx / 10);
        tile.pixels = render_gridtag(encode_gridtag(payload), modulePx);
        tile.inkBox = {modulePx, modulePx, 8 * modulePx, 8 * modulePx};
    } else {
        throw std::invalid_argument("background is not a placeable marker kind");
    }
    return tile;
}

void apply_lighting(PixelGrid& canvas, const Lighting& light) {
    if (light.startFactor == 1.0 && light.endFactor == 1.0) return;
    const int extent = light.axis == Axis::X ? canvas.width : canvas.height;
    std::vector<double> factor(extent);
    for (int i = 0; i < extent; ++i) {
        const double t = extent > 1 ? static_cast<double>(i) / (extent - 1) : 0.0;
        factor[i] = light.startFactor + (light.endFactor - light.startFactor) * t;
    }
    for (int y = 0; y < canvas.height; ++y) {
        for (int x = 0; x < canvas.width; ++x) {
            const double f = factor[light.axis == Axis::X ? x : y];
            const long v = std::lround(canvas.at(x, y) * f);
            canvas.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
        }
    }
}

void paint_occluder(PixelGrid& canvas, const Box& markerBox, const Occluder& occ) {
    const double cx = markerBox.cx(), cy = markerBox.cy();
    const double theta = occ.angleDeg * std::numbers::pi / 180.0;
    const double nx = -std::sin(theta), ny = std::cos(theta); // stripe normal
    const double halfWidth = occ.widthFraction * markerBox.h / 2.0;
    const Box b = clip(markerBox, canvas.width, canvas.height);
    for (int y = b.y; y < b.y2(); ++y) {
        for (int x = b.x; x < b.x2(); ++x) {
            const double d = (x + 0.5 - cx) * nx + (y + 0.5 - cy) * ny;
            if (std::abs(d) <= halfWidth) canvas.at(x, y) = kPaper;
        }
    }
}

} // namespace

ComposedScene compose_scene(const SceneSpec& spec, std::uint64_t seed) {
    validate(spec);
    Rng rng(seed);
    Rng clutterRng = rng.fork(1);
    Rng renderRng = rng.fork(2);

    ComposedScene scene;
    scene.image = PixelGrid(spec.width, spec.height, kPaper);
    if (spec.background.clutter)
        paint_clutter(scene.image, spec.background.density, clutterRng);

    std::vector<Box> stamps;
    for (const Placement& p : spec.placements) {
        const int target = std::max(10, static_cast<int>(std::lround(p.heightFraction * spec.height)));
        const MarkerTile tile = make_marker_tile(p, target, renderRng.next_u64());

        int px = static_cast<int>(std::lround(p.centerX * spec.width - tile.pixels.width / 2.0));
        int py = static_cast<int>(std::lround(p.centerY * spec.height - tile.pixels.height / 2.0));
        px = std::clamp(px, 0, std::max(0, spec.width - tile.pixels.width));
        py = std::clamp(py, 0, std::max(0, spec.height - tile.pixels.height));

        const Box stamp = clip({px - kStampPad, py - kStampPad, tile.pixels.width + 2 * kStampPad,
                                tile.pixels.height + 2 * kStampPad},
                               spec.width, spec.height);
        for (const Box& other : stamps) {
            if (intersect(stamp, other).area() > 0)
                throw OverlappingPlacementsError("marker placements overlap at rendered extents");
        }
        stamps.push_back(stamp);

        for (int y = stamp.y; y < stamp.y2(); ++y)
            for (int x = stamp.x; x < stamp.x2(); ++x) scene.image.at(x, y) = kPaper;
        const Box paste = clip({px, py, tile.pixels.width, tile.pixels.height}, spec.width, spec.height);
        for (int y = paste.y; y < paste.y2(); ++y)
            for (int x = paste.x; x < paste.x2(); ++x)
                scene.image.at(x, y) = tile.pixels.at(x - px, y - py);

        GroundTruthEntry gt;
        gt.kind = p.kind;
        gt.payload = p.kind == MarkerKind::Artcode ? format_code(parse_code(p.payload)) : p.payload;
        gt.bbox = {px + tile.inkBox.x, py + tile.inkBox.y, tile.inkBox.w, tile.inkBox.h};
        gt.occluded = p.occluder.has_value();
        scene.truth.push_back(gt);
    }

    apply_lighting(scene.image, spec.lighting);

    for (std::size_t i = 0; i < spec.placements.size(); ++i) {
        if (spec.placements[i].occluder)
            paint_occluder(scene.image, scene.truth[i].bbox, *spec.placements[i].occluder);
    }
    return scene;
}

std::vector<ComposedScene> approach_sequence(const SceneSpec& scene, const SequenceSpec& seq,
                                             std::uint64_t seed) {
    if (scene.placements.size() != 1)
        throw std::invalid_argument("approach sequence needs exactly one placement");
    if (seq.frames < 2 || seq.startHeightFraction <= 0 ||
        seq.startHeightFraction >= seq.endHeightFraction || seq.endHeightFraction > 1)
        throw std::invalid_argument("sequence spec invalid");

    const double ratio = seq.endHeightFraction / seq.startHeightFraction;
    std::vector<ComposedScene> frames;
    for (int i = 0; i < seq.frames; ++i) {
        SceneSpec frameSpec = scene;
        const double t = static_cast<double>(i) / (seq.frames - 1);
        frameSpec.placements[0].heightFraction = seq.startHeightFraction * std::pow(ratio, t);
        frames.push_back(compose_scene(frameSpec, seed));
    }
    return frames;
}

std::vector<LabeledSample> emit_corpus(int numPerKind, int windowPx, std::uint64_t seed) {
    if (numPerKind < 1) throw std::invalid_argument("numPerKind must be >= 1");
    std::vector<LabeledSample> samples;
    samples.reserve(static_cast<std::size_t>(numPerKind) * 3);
    Rng rng(seed);
    const Box window{0, 0, windowPx, windowPx};

    for (int kindIndex = 0; kindIndex < 3; ++kindIndex) {
        const MarkerKind kind = static_cast<MarkerKind>(kindIndex);
        for (int i = 0; i < numPerKind; ++i) {
            SceneSpec spec;
            spec.width = spec.height = windowPx;
            spec.lighting.startFactor = rng.uniform(0.55, 1.15);
            spec.lighting.endFactor = rng.uniform(0.55, 1.15);
            spec.lighting.axis = rng.next_double() < 0.5 ? Axis::X : Axis::Y;

            if (kind == MarkerKind::Background) {
                if (rng.next_double() < 0.65) {
                    spec.background.clutter = true;
                    spec.background.density = rng.uniform(1.0, 8.0);
                }
            } else {
                Placement p;
                p.kind = kind;
                p.heightFraction = rng.uniform(0.5, 0.95);
                p.centerX = rng.uniform(0.42, 0.58);
                p.centerY = rng.uniform(0.42, 0.58);
                if (kind == MarkerKind::Artcode) {
                    // Redraw until the descriptor fits at canonical resolution.
                    for (;;) {
                        ArtcodeDescriptor d;
                        const int branches = static_cast<int>(rng.uniform_int(3, 12));
                        for (int b = 0; b < branches; ++b)
                            d.leafCounts.push_back(static_cast<int>(rng.uniform_int(1, 9)));
                        std::sort(d.leafCounts.begin(), d.leafCounts.end());
                        try {
                            render_artcode(d, kCanonicalRenderPx, seed ^ (i * 0x9E37u));
                            p.payload = format_code(d);
                            break;
                        } catch (const UnrenderableError&) {
                        }
                    }
                } else {
                    p.payload = format_payload(
                        {static_cast<std::uint16_t>(rng.uniform_int(0, 0xFFFF))});
                }
                spec.placements.push_back(p);
            }
            const ComposedScene scene = compose_scene(spec, rng.next_u64());
            samples.push_back({extract_features(scene.image, window), kind});
        }
    }
    return samples;
}

std::vector<LabeledSample> emit_detection_corpus(int numPerKind, int windowPx,
                                                 std::uint64_t seed) {
    const int wholeCount = numPerKind / 4;
    std::vector<LabeledSample> samples = emit_corpus(wholeCount, windowPx, seed);

    // Size-matched views under scan conditions: the marker roughly fills the
    // window (including slight overflow, as a proposal box over a large
    // marker sees it), with clutter and occluder jitter so the Hard-study
    // statistics are in distribution.
    const int viewCount = numPerKind - wholeCount;
    Rng rng(seed ^ 0xDE7EC7ull);
    const int canvasPx = windowPx * 2;
    for (int kindIndex = 0; kindIndex < 3; ++kindIndex) {
        const MarkerKind kind = static_cast<MarkerKind>(kindIndex);
        for (int i = 0; i < viewCount; ++i) {
            SceneSpec spec;
            spec.width = spec.height = canvasPx;
            spec.lighting.startFactor = rng.uniform(0.55, 1.15);
            spec.lighting.endFactor = rng.uniform(0.55, 1.15);
            spec.lighting.axis = rng.next_double() < 0.5 ? Axis::X : Axis::Y;
            if (rng.next_double() < 0.5) {
                spec.background.clutter = true;
                spec.background.density = rng.uniform(0.5, 7.0);
            }

            Box window{static_cast<int>(rng.uniform_int(0, canvasPx - windowPx)),
                       static_cast<int>(rng.uniform_int(0, canvasPx - windowPx)), windowPx,
                       windowPx};
            if (kind != MarkerKind::Background) {
                Placement p;
                p.kind = kind;
                // Half fully-visible, half overflowing the window: proposal
                // boxes over markers larger than the biggest scale see a cut
                // view and must still identify it.
                const double ratio = rng.next_double() < 0.5 ? rng.uniform(0.55, 0.95)
                                                             : rng.uniform(0.95, 1.5);
                p.heightFraction = windowPx * ratio / canvasPx;
                if (rng.next_double() < 0.25)
                    p.occluder = Occluder{rng.uniform(0.0, 180.0), rng.uniform(0.1, 0.2)};
                if (kind == MarkerKind::Artcode) {
                    for (;;) {
                        ArtcodeDescriptor d;
                        const int branches = static_cast<int>(rng.uniform_int(3, 12));
                        for (int b = 0; b < branches; ++b)
                            d.leafCounts.push_back(static_cast<int>(rng.uniform_int(1, 9)));
                        std::sort(d.leafCounts.begin(), d.leafCounts.end());
                        try {
                            render_artcode(d, kCanonicalRenderPx, rng.next_u64());
                            p.payload = format_code(d);
                            break;
                        } catch (const UnrenderableError&) {
                        }
                    }
                } else {
                    p.payload =
                        format_payload({static_cast<std::uint16_t>(rng.uniform_int(0, 0xFFFF))});
                }
                spec.placements.push_back(p);
            }

            const ComposedScene scene = compose_scene(spec, rng.next_u64());
            if (!scene.truth.empty()) {
                const Box bbox = scene.truth.front().bbox;
                const double cx = bbox.cx() + rng.uniform(-0.1, 0.1) * bbox.w;
                const double cy = bbox.cy() + rng.uniform(-0.1, 0.1) * bbox.h;
                window.x = std::clamp(static_cast<int>(cx) - windowPx / 2, 0,
                                      canvasPx - windowPx);
                window.y = std::clamp(static_cast<int>(cy) - windowPx / 2, 0,
                                      canvasPx - windowPx);
            }
            samples.push_back({extract_features(scene.image, window), kind});
        }
    }
    return samples;
}

// ---------------------------------------------------------------------------
// JSON wire formats
// ---------------------------------------------------------------------------

namespace {

MarkerKind kind_from_name(const std::string& name) {
    for (int k = 0; k < kKindCount; ++k)
        if (name == kind_name(static_cast<MarkerKind>(k))) return static_cast<MarkerKind>(k);
    throw std::invalid_argument("unknown marker kind: " + name);
}

} // namespace

SceneSpec scene_spec_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    SceneSpec spec;
    spec.width = doc.at("canvas").at("width").get<int>();
    spec.height = doc.at("canvas").at("height").get<int>();
    if (doc.contains("background")) {
        const auto& bg = doc.at("background");
        const std::string type = bg.value("type", "plain");
        if (type == "clutter") {
            spec.background.clutter = true;
            spec.background.density = bg.at("density").get<double>();
        } else if (type != "plain") {
            throw std::invalid_argument("background type must be plain or clutter");
        }
    }
    if (doc.contains("lighting")) {
        const auto& light = doc.at("lighting");
        spec.lighting.startFactor = light.value("startFactor", 1.0);
        spec.lighting.endFactor = light.value("endFactor", 1.0);
        spec.lighting.axis = light.value("axis", "x") == "y" ? Axis::Y : Axis::X;
    }
    for (const auto& pj : doc.value("placements", nlohmann::json::array())) {
        Placement p;
        p.kind = kind_from_name(pj.at("kind").get<std::string>());
        p.payload = pj.at("payload").get<std::string>();
        p.centerX = pj.at("center").at(0).get<double>();
        p.centerY = pj.at("center").at(1).get<double>();
        p.heightFraction = pj.at("heightFraction").get<double>();
        if (pj.contains("occluder")) {
            Occluder occ;
            occ.angleDeg = pj.at("occluder").value("angleDeg", 0.0);
            occ.widthFraction = pj.at("occluder").value("widthFraction", 0.15);
            p.occluder = occ;
        }
        spec.placements.push_back(p);
    }
    return spec;
}

SequenceSpec sequence_spec_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    SequenceSpec seq;
    seq.frames = doc.value("frames", 5);
    seq.startHeightFraction = doc.at("startHeightFraction").get<double>();
    seq.endHeightFraction = doc.at("endHeightFraction").get<double>();
    return seq;
}

std::string ground_truth_to_json(const GroundTruth& truth) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const GroundTruthEntry& gt : truth) {
        arr.push_back({{"kind", kind_name(gt.kind)},
                       {"payload", gt.payload},
                       {"box", {gt.bbox.x, gt.bbox.y, gt.bbox.w, gt.bbox.h}},
                       {"occluded", gt.occluded}});
    }
    return arr.dump(2) + "\n";
}

} // namespace markerforge
