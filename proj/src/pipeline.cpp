#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "markerforge/gridtag.hpp"
#include "markerforge/pipeline.hpp"

namespace markerforge {

DecoderPool register_decoder(DecoderPool pool, MarkerKind kind, Decoder decoder) {
    if (kind == MarkerKind::Background)
        throw BackgroundNotDecodableError("background has no decoder");
    pool.registry[kind] = std::move(decoder);
    return pool;
}

Decoder make_artcode_decoder(const ValidationPolicy& policy) {
    return [policy](const PixelGrid& grid, const Box& box) -> DecodeOutcome {
        const PixelGrid window = crop(grid, box);
        const auto tree = build_rat(label_components(adaptive_threshold(window)));
        const auto found = extract_artcodes(tree, policy);
        if (found.empty()) return {DecodeStatus::NoMarker, "", ""};
        // Nearest root bbox center to the crop center wins.
        const double cx = window.width / 2.0, cy = window.height / 2.0;
        const ArtcodeCandidate* best = &found.front();
        double bestDist = std::hypot(best->bbox.cx() - cx, best->bbox.cy() - cy);
        for (const ArtcodeCandidate& cand : found) {
            const double dist = std::hypot(cand.bbox.cx() - cx, cand.bbox.cy() - cy);
            if (dist < bestDist) {
                best = &cand;
                bestDist = dist;
            }
        }
        return {DecodeStatus::Decoded, format_code(best->descriptor), ""};
    };
}

Decoder make_gridtag_decoder() {
    return [](const PixelGrid& grid, const Box& box) -> DecodeOutcome {
        const PixelGrid window = crop(grid, box);
        const LabelMap labels = label_components(adaptive_threshold(window));
        // The tag's border ring is the dominant ink component in the crop.
        std::vector<std::int64_t> area(labels.componentCount, 0);
        std::vector<Box> bbox(labels.componentCount);
        std::vector<bool> seen(labels.componentCount, false);
        for (int y = 0; y < labels.height; ++y) {
            for (int x = 0; x < labels.width; ++x) {
                const std::int32_t id = labels.at(x, y);
                ++area[id];
                if (!seen[id]) {
                    seen[id] = true;
                    bbox[id] = {x, y, 1, 1};
                } else {
                    if (x < bbox[id].x) { bbox[id].w += bbox[id].x - x; bbox[id].x = x; }
                    if (x >= bbox[id].x2()) bbox[id].w = x - bbox[id].x + 1;
                    if (y >= bbox[id].y2()) bbox[id].h = y - bbox[id].y + 1;
                }
            }
        }
        std::int32_t best = -1;
        for (std::int32_t id = 0; id < labels.componentCount; ++id) {
            if (labels.polarity[id] != Polarity::Ink || area[id] < 64) continue;
            if (best < 0 || area[id] > area[best]) best = id;
        }
        if (best < 0) return {DecodeStatus::NoMarker, "", ""};
        const Box tagBox{box.x + bbox[best].x, box.y + bbox[best].y, bbox[best].w, bbox[best].h};
        try {
            return {DecodeStatus::Decoded, format_payload(decode_gridtag(grid, tagBox)), ""};
        } catch (const GridTagError& e) {
            if (e.code() == GridTagErrorCode::BorderNotFound)
                return {DecodeStatus::NoMarker, "", ""};
            const char* reason = e.code() == GridTagErrorCode::OrientationInvalid ? "orientation"
                                 : e.code() == GridTagErrorCode::ChecksumMismatch ? "checksum"
                                                                                  : "structure";
            return {DecodeStatus::Invalid, "", reason};
        } catch (const std::invalid_argument&) {
            return {DecodeStatus::NoMarker, "", ""};
        }
    };
}

UrfResult run_urf(const PixelGrid& grid, const ClassifierModel& model, const DecoderPool& pool,
                  const UrfConfig& cfg, const std::string& imageId) {
    const auto start = std::chrono::steady_clock::now();

    UrfResult result;
    result.report.imageId = imageId;
    result.candidates = suppress(scan_windows(grid, model, cfg.windowSpec), cfg.nmsIou);
    result.heat = accumulate_heatmap(result.candidates, grid.width, grid.height);

    for (const CandidateBox& cand : result.candidates) {
        ReportedCandidate entry;
        entry.bbox = cand.bbox;
        entry.scores = cand.scores;
        entry.predictedKind = cand.predictedKind;
        if (cand.predictedKind != MarkerKind::Background) {
            const auto it = pool.registry.find(cand.predictedKind);
            if (it == pool.registry.end())
                throw MissingDecoderError(std::string("no decoder registered for ") +
                                          kind_name(cand.predictedKind));
            const Box padded = pad(cand.bbox, cfg.decodePadding, grid.width, grid.height);
            entry.outcome = it->second(grid, padded);
        }
        result.report.candidates.push_back(std::move(entry));
    }

    result.report.elapsedMs = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
    return result;
}

std::string report_to_json(const ScanReport& report) {
    nlohmann::ordered_json doc;
    doc["image"] = report.imageId;
    doc["candidates"] = nlohmann::ordered_json::array();
    for (const ReportedCandidate& cand : report.candidates) {
        nlohmann::ordered_json entry;
        entry["box"] = {cand.bbox.x, cand.bbox.y, cand.bbox.w, cand.bbox.h};
        entry["scores"] = {{"background", cand.scores[0]},
                           {"artcode", cand.scores[1]},
                           {"gridtag", cand.scores[2]}};
        entry["kind"] = kind_name(cand.predictedKind);
        if (cand.outcome) {
            switch (cand.outcome->status) {
                case DecodeStatus::Decoded: entry["status"] = "decoded"; break;
                case DecodeStatus::NoMarker: entry["status"] = "no_marker"; break;
                case DecodeStatus::Invalid: entry["status"] = "invalid"; break;
            }
            entry["payload"] = cand.outcome->status == DecodeStatus::Decoded
                                   ? nlohmann::ordered_json(cand.outcome->payload)
                                   : nlohmann::ordered_json(nullptr);
            entry["reason"] = cand.outcome->status == DecodeStatus::Invalid
                                  ? nlohmann::ordered_json(cand.outcome->reason)
                                  : nlohmann::ordered_json(nullptr);
        } else {
            entry["status"] = "skipped";
            entry["payload"] = nullptr;
            entry["reason"] = nullptr;
        }
        doc["candidates"].push_back(entry);
    }
    doc["heatmap"] = report.heatMapRef;
    doc["elapsedMs"] = report.elapsedMs;
    return doc.dump(2) + "\n";
}

} // namespace markerforge
