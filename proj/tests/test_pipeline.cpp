#include <doctest.h>

#include "markerforge/pipeline.hpp"
#include "markerforge/scenegen.hpp"
#include "shared_model.hpp"

using namespace markerforge;
using testing_support::shared_model;

namespace {

DecoderPool full_pool() {
    DecoderPool pool;
    pool = register_decoder(std::move(pool), MarkerKind::Artcode, make_artcode_decoder({}));
    pool = register_decoder(std::move(pool), MarkerKind::GridTag, make_gridtag_decoder());
    return pool;
}

std::string strip_elapsed(std::string text) {
    const auto pos = text.find("\"elapsedMs\"");
    if (pos != std::string::npos) {
        const auto end = text.find('\n', pos);
        text.erase(pos, end - pos);
    }
    return text;
}

} // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("register_decoder semantics") {
    DecoderPool pool;
    CHECK_THROWS_AS(
        register_decoder(pool, MarkerKind::Background,
                         [](const PixelGrid&, const Box&) { return DecodeOutcome{}; }),
        BackgroundNotDecodableError);

    int which = 0;
    pool = register_decoder(std::move(pool), MarkerKind::Artcode,
                            [&](const PixelGrid&, const Box&) {
                                which = 1;
                                return DecodeOutcome{};
                            });
    pool = register_decoder(std::move(pool), MarkerKind::GridTag,
                            [&](const PixelGrid&, const Box&) { return DecodeOutcome{}; });
    CHECK(pool.has(MarkerKind::Artcode));
    CHECK(pool.has(MarkerKind::GridTag));

    // re-registration replaces
    pool = register_decoder(std::move(pool), MarkerKind::Artcode,
                            [&](const PixelGrid&, const Box&) {
                                which = 2;
                                return DecodeOutcome{};
                            });
    PixelGrid dummy(8, 8, 0);
    pool.registry[MarkerKind::Artcode](dummy, {0, 0, 8, 8});
    CHECK(which == 2);
}

TEST_CASE("blank scene produces an empty report and zero heat") {
    PixelGrid blank(512, 512, 235);
    const UrfResult result = run_urf(blank, shared_model(), full_pool(), {}, "blank");
    CHECK(result.report.candidates.empty());
    for (double v : result.heat.intensity) CHECK(v == 0.0);
    CHECK(result.report.imageId == "blank");
}

TEST_CASE("single artcode scene decodes to exactly one payload") {
    SceneSpec spec;
    spec.width = spec.height = 768;
    spec.placements.push_back({MarkerKind::Artcode, "1:1:2:4:4", 0.5, 0.5, 0.4, {}});
    const ComposedScene scene = compose_scene(spec, 21);

    const UrfResult result = run_urf(scene.image, shared_model(), full_pool(), {}, "one");
    int decoded = 0;
    for (const ReportedCandidate& cand : result.report.candidates) {
        if (cand.outcome && cand.outcome->status == DecodeStatus::Decoded) {
            ++decoded;
            CHECK(cand.outcome->payload == "1:1:2:4:4");
            // every decoded artcode payload re-validates under the policy
            CHECK(validate_descriptor(parse_code(cand.outcome->payload), {}) ==
                  ValidationOutcome::Valid);
        }
    }
    CHECK(decoded >= 1);

    // heat peaks on the marker
    const Box gt = scene.truth.front().bbox;
    int bx = 0, by = 0;
    double best = -1;
    for (int y = 0; y < result.heat.height; ++y)
        for (int x = 0; x < result.heat.width; ++x)
            if (result.heat.at(x, y) > best) {
                best = result.heat.at(x, y);
                bx = x;
                by = y;
            }
    CHECK(pad(gt, 0.1, 768, 768).contains(bx, by));
}

TEST_CASE("mixed scene reports both families with correct payloads") {
    SceneSpec spec;
    spec.width = spec.height = 768;
    spec.placements.push_back({MarkerKind::Artcode, "1:1:2:4:4", 0.28, 0.30, 0.34, {}});
    spec.placements.push_back({MarkerKind::GridTag, "BEEF", 0.72, 0.70, 0.30, {}});
    const ComposedScene scene = compose_scene(spec, 33);

    const UrfResult result = run_urf(scene.image, shared_model(), full_pool(), {}, "mixed");
    bool artDecoded = false, tagDecoded = false;
    for (const ReportedCandidate& cand : result.report.candidates) {
        if (!cand.outcome || cand.outcome->status != DecodeStatus::Decoded) continue;
        if (cand.predictedKind == MarkerKind::Artcode && cand.outcome->payload == "1:1:2:4:4")
            artDecoded = true;
        if (cand.predictedKind == MarkerKind::GridTag && cand.outcome->payload == "BEEF")
            tagDecoded = true;
    }
    CHECK(artDecoded);
    CHECK(tagDecoded);
}

TEST_CASE("reports are deterministic modulo elapsed time") {
    SceneSpec spec;
    spec.width = spec.height = 512;
    spec.background = {true, 3.0};
    spec.placements.push_back({MarkerKind::Artcode, "1:2:3", 0.5, 0.5, 0.5, {}});
    const ComposedScene scene = compose_scene(spec, 5);

    const UrfResult a = run_urf(scene.image, shared_model(), full_pool(), {}, "det");
    const UrfResult b = run_urf(scene.image, shared_model(), full_pool(), {}, "det");
    CHECK(strip_elapsed(report_to_json(a.report)) == strip_elapsed(report_to_json(b.report)));
    CHECK(a.heat.intensity == b.heat.intensity);
}

TEST_CASE("pool entries are independent") {
    SceneSpec spec;
    spec.width = spec.height = 768;
    spec.placements.push_back({MarkerKind::Artcode, "1:1:2:4:4", 0.5, 0.5, 0.4, {}});
    const ComposedScene scene = compose_scene(spec, 8);

    DecoderPool artOnly;
    artOnly = register_decoder(std::move(artOnly), MarkerKind::Artcode, make_artcode_decoder({}));

    const std::string withBoth =
        strip_elapsed(report_to_json(run_urf(scene.image, shared_model(), full_pool(), {}, "p").report));
    std::string artOnlyReport;
    try {
        artOnlyReport = strip_elapsed(
            report_to_json(run_urf(scene.image, shared_model(), artOnly, {}, "p").report));
    } catch (const MissingDecoderError&) {
        // Only acceptable if some candidate was predicted GridTag in the
        // full-pool run; otherwise the reports must match.
        bool anyGridTag = false;
        for (const auto& c : run_urf(scene.image, shared_model(), full_pool(), {}, "p")
                                 .report.candidates)
            anyGridTag |= c.predictedKind == MarkerKind::GridTag;
        CHECK(anyGridTag);
        return;
    }
    CHECK(artOnlyReport == withBoth);
}

TEST_CASE("missing decoder raises only when dispatched") {
    SceneSpec spec;
    spec.width = spec.height = 768;
    spec.placements.push_back({MarkerKind::GridTag, "0A0B", 0.5, 0.5, 0.4, {}});
    const ComposedScene scene = compose_scene(spec, 14);

    DecoderPool artOnly;
    artOnly = register_decoder(std::move(artOnly), MarkerKind::Artcode, make_artcode_decoder({}));
    CHECK_THROWS_AS(run_urf(scene.image, shared_model(), artOnly, {}, "x"),
                    MissingDecoderError);
}

TEST_CASE("report JSON carries the schema fields") {
    ScanReport report;
    report.imageId = "img.pgm";
    report.heatMapRef = "out/heat.pgm";
    report.elapsedMs = 12;
    ReportedCandidate c;
    c.bbox = {1, 2, 3, 4};
    c.scores = {0.2, 0.7, 0.1};
    c.predictedKind = MarkerKind::Artcode;
    c.outcome = DecodeOutcome{DecodeStatus::Decoded, "1:1:2", ""};
    report.candidates.push_back(c);
    ReportedCandidate inv = c;
    inv.outcome = DecodeOutcome{DecodeStatus::Invalid, "", "checksum"};
    inv.predictedKind = MarkerKind::GridTag;
    report.candidates.push_back(inv);

    const std::string json = report_to_json(report);
    CHECK(json.find("\"image\": \"img.pgm\"") != std::string::npos);
    CHECK(json.find("\"box\": [") != std::string::npos);
    CHECK(json.find("\"background\": 0.2") != std::string::npos);
    CHECK(json.find("\"kind\": \"artcode\"") != std::string::npos);
    CHECK(json.find("\"status\": \"decoded\"") != std::string::npos);
    CHECK(json.find("\"payload\": \"1:1:2\"") != std::string::npos);
    CHECK(json.find("\"reason\": \"checksum\"") != std::string::npos);
    CHECK(json.find("\"heatmap\": \"out/heat.pgm\"") != std::string::npos);
    CHECK(json.find("\"elapsedMs\": 12") != std::string::npos);
}

TEST_SUITE_END();
