#include <doctest.h>

#include <cmath>

#include "markerforge/artcode.hpp"
#include "markerforge/detector.hpp"
#include "markerforge/rng.hpp"

using namespace markerforge;

namespace {

FeatureVector random_features(Rng& rng) {
    FeatureVector f;
    for (auto& v : f.values) v = rng.uniform(-1.0, 3.0);
    return f;
}

} // namespace

TEST_SUITE_BEGIN("detector");

TEST_CASE("features on uniform and marker windows") {
    PixelGrid paper(64, 64, 235);
    const FeatureVector fp = extract_features(paper, {0, 0, 64, 64});
    CHECK(fp.values[0] == 0.0); // no ink
    CHECK(fp.values[6] == 0.0); // no gradient
    CHECK(fp.values[7] == 0.0); // no variance

    PixelGrid ink(64, 64, 20);
    CHECK(extract_features(ink, {0, 0, 64, 64}).values[0] == 1.0);

    PixelGrid half(64, 64, 235);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 32; ++x) half.at(x, y) = 20;
    CHECK(extract_features(half, {0, 0, 64, 64}).values[0] == 0.5);

    const PixelGrid marker = render_artcode({{1, 1, 2, 4, 4}}, 128, 3);
    const FeatureVector fm = extract_features(marker, {0, 0, 128, 128});
    CHECK(fm.values[5] > 0.0);  // depth-3 chains present
    CHECK(fm.values[4] >= 0.8); // depth-4 tree
}

TEST_CASE("feature box preconditions") {
    PixelGrid grid(64, 64, 235);
    CHECK_THROWS_AS(extract_features(grid, {0, 0, 16, 16}), std::invalid_argument);
    CHECK_THROWS_AS(extract_features(grid, {40, 40, 64, 64}), std::invalid_argument);
}

TEST_CASE("zero-weight classifier is uniform") {
    ClassifierModel model;
    model.featureStds.fill(1.0);
    Rng rng(1);
    const auto scores = classify(model, random_features(rng));
    for (double s : scores) CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("classify scores sum to one and shift invariance holds") {
    Rng rng(2);
    ClassifierModel model;
    model.featureStds.fill(1.0);
    for (auto& row : model.weights)
        for (auto& w : row) w = rng.uniform(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const FeatureVector f = random_features(rng);
        const auto scores = classify(model, f);
        CHECK(std::abs(scores[0] + scores[1] + scores[2] - 1.0) < 1e-9);
        for (double s : scores) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
        ClassifierModel shifted = model;
        for (auto& row : shifted.weights)
            for (int j = 0; j < 9; ++j) row[j] += 0.75;
        const auto scores2 = classify(shifted, f);
        for (int k = 0; k < 3; ++k) CHECK(scores2[k] == doctest::Approx(scores[k]).epsilon(1e-9));
    }
}

TEST_CASE("training requires every kind") {
    std::vector<LabeledSample> samples;
    Rng rng(3);
    samples.push_back({random_features(rng), MarkerKind::Background});
    samples.push_back({random_features(rng), MarkerKind::Artcode});
    CHECK_THROWS_AS(train_classifier(samples), MissingKindError);
}

TEST_CASE("trainer separates a separable toy set perfectly") {
    Rng rng(4);
    std::vector<LabeledSample> samples;
    for (int i = 0; i < 60; ++i) {
        FeatureVector f = random_features(rng);
        const int kind = i % 3;
        f.values[0] = kind * 2.0 + rng.uniform(-0.4, 0.4); // separable on f1
        samples.push_back({f, static_cast<MarkerKind>(kind)});
    }
    const ClassifierModel model = train_classifier(samples);
    int correct = 0;
    for (const auto& [f, kind] : samples) {
        const auto scores = classify(model, f);
        const int arg = static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                                         scores.begin());
        correct += arg == static_cast<int>(kind);
    }
    CHECK(correct == 60);
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(5);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<LabeledSample> samples;
        for (int i = 0; i < 10; ++i)
            samples.push_back(
                {random_features(rng), static_cast<MarkerKind>(rng.uniform_int(0, 2))});
        std::array<double, 8> means{}, stds;
        stds.fill(1.0);
        for (int j = 0; j < 8; ++j) means[j] = rng.uniform(-0.5, 0.5);

        WeightMatrix w{};
        for (auto& row : w)
            for (auto& v : row) v = rng.uniform(-1, 1);

        const WeightMatrix grad = cross_entropy_gradient(w, samples, means, stds);
        const double eps = 1e-5;
        for (int k = 0; k < 3; ++k) {
            for (int j = 0; j < 9; ++j) {
                WeightMatrix lo = w, hi = w;
                lo[k][j] -= eps;
                hi[k][j] += eps;
                const double fd = (cross_entropy(hi, samples, means, stds) -
                                   cross_entropy(lo, samples, means, stds)) /
                                  (2 * eps);
                const double rel = std::abs(fd - grad[k][j]) /
                                   std::max({1.0, std::abs(fd), std::abs(grad[k][j])});
                CHECK(rel < 1e-5);
            }
        }
    }
}

TEST_CASE("scan_windows covers every pixel at threshold zero") {
    PixelGrid grid(100, 70, 235);
    ClassifierModel model;
    model.featureStds.fill(1.0);
    WindowSpec spec;
    spec.scales = {32, 64};
    spec.scoreThreshold = 0.0;
    const auto cands = scan_windows(grid, model, spec);

    // threshold 0 keeps every window
    int expected = 0;
    for (int side : spec.scales) {
        const int stride = std::max(1, static_cast<int>(std::lround(side * 0.25)));
        auto count = [&](int extent) {
            int n = 0;
            for (int x = 0;; x += stride) {
                ++n;
                if (x + side >= extent) break;
            }
            return n;
        };
        expected += count(100) * count(70);
    }
    CHECK(static_cast<int>(cands.size()) == expected);

    std::vector<std::uint8_t> covered(100 * 70, 0);
    for (const CandidateBox& c : cands)
        for (int y = c.bbox.y; y < c.bbox.y2(); ++y)
            for (int x = c.bbox.x; x < c.bbox.x2(); ++x) covered[y * 100 + x] = 1;
    CHECK(std::count(covered.begin(), covered.end(), 1) == 100 * 70);

    // deterministic order: scale ascending, then raster
    for (std::size_t i = 1; i < cands.size(); ++i) {
        const Box& a = cands[i - 1].bbox;
        const Box& b = cands[i].bbox;
        const bool ordered = a.w < b.w || (a.w == b.w && (a.y < b.y || (a.y == b.y && a.x < b.x)));
        CHECK(ordered);
    }
}

TEST_CASE("scan_windows rejects too-small images") {
    PixelGrid grid(48, 48, 235);
    ClassifierModel model;
    model.featureStds.fill(1.0);
    CHECK_THROWS_AS(scan_windows(grid, model, {}), ImageTooSmallError);
}

TEST_CASE("suppress keeps the strongest of overlapping same-kind boxes") {
    CandidateBox strong{{10, 10, 50, 50}, {0.1, 0.9, 0.0}, MarkerKind::Artcode};
    CandidateBox weak{{10, 10, 50, 50}, {0.2, 0.8, 0.0}, MarkerKind::Artcode};
    CandidateBox otherKind{{12, 12, 50, 50}, {0.2, 0.0, 0.8}, MarkerKind::GridTag};
    CandidateBox disjoint{{200, 200, 40, 40}, {0.3, 0.7, 0.0}, MarkerKind::Artcode};

    const auto kept = suppress({weak, strong, otherKind, disjoint}, 0.5);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].scores[1] == 0.9); // strongest first
    CHECK(kept[1].predictedKind == MarkerKind::GridTag);
    CHECK(kept[2].bbox.x == 200);

    // single candidate unchanged; idempotence
    CHECK(suppress({strong}, 0.5).size() == 1);
    const auto twice = suppress(kept, 0.5);
    REQUIRE(twice.size() == kept.size());
    for (std::size_t i = 0; i < twice.size(); ++i) CHECK(twice[i].bbox == kept[i].bbox);
}

TEST_CASE("heat map accumulation and normalization") {
    CHECK(accumulate_heatmap({}, 8, 8).intensity == std::vector<double>(64, 0.0));

    CandidateBox whole{{0, 0, 8, 8}, {0.2, 0.8, 0.0}, MarkerKind::Artcode};
    const PresenceHeatMap uniform = accumulate_heatmap({whole}, 8, 8);
    for (double v : uniform.intensity) CHECK(v == 1.0);

    // two boxes overlapping on a strip: strip 1.0, rest 0.5
    CandidateBox left{{0, 0, 6, 8}, {0.2, 0.8, 0.0}, MarkerKind::Artcode};
    CandidateBox right{{2, 0, 6, 8}, {0.2, 0.8, 0.0}, MarkerKind::Artcode};
    const PresenceHeatMap strip = accumulate_heatmap({left, right}, 8, 8);
    CHECK(strip.at(0, 0) == 0.5);
    CHECK(strip.at(3, 4) == 1.0);
    CHECK(strip.at(7, 7) == 0.5);

    double maxv = 0;
    for (double v : strip.intensity) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        maxv = std::max(maxv, v);
    }
    CHECK(maxv == 1.0);
}

TEST_CASE("fuse_overlay endpoints") {
    PixelGrid grid(2, 1);
    grid.luma = {100, 200};
    PresenceHeatMap heat;
    heat.width = 2;
    heat.height = 1;
    heat.intensity = {0.0, 1.0};

    const RasterImage zero = fuse_overlay(grid, heat, 0.0);
    CHECK(zero.samples == std::vector<std::uint8_t>{100, 100, 100, 200, 200, 200});

    const RasterImage full = fuse_overlay(grid, heat, 1.0);
    CHECK(full.at(0, 0, 0) == 100); // h = 0 pixel unchanged
    CHECK(full.at(1, 0, 0) == 255); // h = 1 pixel is the highlight color
    CHECK(full.at(1, 0, 1) == 64);
    CHECK(full.at(1, 0, 2) == 0);

    PresenceHeatMap wrong;
    wrong.width = 3;
    wrong.height = 1;
    wrong.intensity = {0, 0, 0};
    CHECK_THROWS_AS(fuse_overlay(grid, wrong, 0.5), DimensionMismatchError);
}

TEST_CASE("annotate_boxes draws clipped yellow outlines") {
    PixelGrid grid(10, 10, 50);
    RasterImage rgb = to_rgb(grid);
    CHECK_THROWS_AS(annotate_boxes({10, 10, 1, grid.luma}, {{0, 0, 5, 5}}, 1), NotRgbError);

    const RasterImage same = annotate_boxes(rgb, {}, 1);
    CHECK(same.samples == rgb.samples);

    // full-image 1 px box yellows exactly the border
    const RasterImage edged = annotate_boxes(rgb, {{0, 0, 10, 10}}, 1);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            const bool border = x == 0 || y == 0 || x == 9 || y == 9;
            CHECK(edged.at(x, y, 0) == (border ? 255 : 50));
            CHECK(edged.at(x, y, 1) == (border ? 255 : 50));
            CHECK(edged.at(x, y, 2) == (border ? 0 : 50));
        }
    }

    // overlapping boxes paint once; out-of-range parts are clipped
    const RasterImage two = annotate_boxes(rgb, {{2, 2, 4, 4}, {2, 2, 30, 30}}, 2);
    CHECK(two.at(3, 3, 0) == 255);
}

TEST_CASE("model JSON round-trips bit-exactly and rejects bad arity") {
    Rng rng(6);
    ClassifierModel model;
    for (int j = 0; j < 8; ++j) {
        model.featureMeans[j] = rng.uniform(-1, 1) / 3.0;
        model.featureStds[j] = rng.uniform(0.01, 2.0);
    }
    for (auto& row : model.weights)
        for (auto& w : row) w = rng.uniform(-3, 3) / 7.0;
    model.trainingSeed = 1234567;

    const ClassifierModel back = model_from_json(model_to_json(model));
    CHECK(back.featureMeans == model.featureMeans);
    CHECK(back.featureStds == model.featureStds);
    CHECK(back.weights == model.weights);
    CHECK(back.trainingSeed == model.trainingSeed);

    CHECK_THROWS_AS(model_from_json("{}"), ModelFormatError);
    CHECK_THROWS_AS(model_from_json("not json"), ModelFormatError);
    std::string truncated = model_to_json(model);
    truncated.replace(truncated.find("\"means\""), 7, "\"weans\"");
    CHECK_THROWS_AS(model_from_json(truncated), ModelFormatError);
}

TEST_SUITE_END();
