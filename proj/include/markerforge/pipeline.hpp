#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerforge/artcode.hpp"
#include "markerforge/detector.hpp"

namespace markerforge {

enum class DecodeStatus { Decoded, NoMarker, Invalid };

struct DecodeOutcome {
    DecodeStatus status = DecodeStatus::NoMarker;
    std::string payload; // set iff Decoded
    std::string reason;  // set iff Invalid
};

using Decoder = std::function<DecodeOutcome(const PixelGrid&, const Box&)>;

// Registry of per-family decoders; the background pseudo-kind has none.
struct DecoderPool {
    std::map<MarkerKind, Decoder> registry;

    bool has(MarkerKind kind) const { return registry.count(kind) > 0; }
};

class BackgroundNotDecodableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class MissingDecoderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DecoderPool register_decoder(DecoderPool pool, MarkerKind kind, Decoder decoder);

// The stock decoders: Artcode via threshold -> label -> RAT -> extraction
// (nearest qualifying root to the crop center wins), GridTag via the largest
// ink component's bbox.
Decoder make_artcode_decoder(const ValidationPolicy& policy);
Decoder make_gridtag_decoder();

struct ReportedCandidate {
    Box bbox;
    std::array<double, 3> scores{};
    MarkerKind predictedKind = MarkerKind::Background;
    std::optional<DecodeOutcome> outcome; // absent only for background kinds
};

struct ScanReport {
    std::string imageId;
    std::vector<ReportedCandidate> candidates; // ordered as produced by suppress
    std::string heatMapRef;
    std::int64_t elapsedMs = 0;
};

struct UrfConfig {
    WindowSpec windowSpec;
    double nmsIou = 0.4;
    ValidationPolicy validationPolicy;
    double alpha = 0.6;          // heat-map fusion weight
    double decodePadding = 0.1;  // bbox expansion before dispatch
};

struct UrfResult {
    ScanReport report;
    PresenceHeatMap heat;
    std::vector<CandidateBox> candidates; // suppress output, for overlays
};

// The three URF stages: presence detection (scan + suppress + heat map),
// identification (classifier argmax already on each candidate), decoding
// (dispatch to the pool keyed by predicted kind).
UrfResult run_urf(const PixelGrid& grid, const ClassifierModel& model, const DecoderPool& pool,
                  const UrfConfig& cfg, const std::string& imageId = "");

std::string report_to_json(const ScanReport& report);

} // namespace markerforge
