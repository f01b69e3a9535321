#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerforge/detector.hpp"
#include "markerforge/image.hpp"

namespace markerforge {

enum class Axis { X, Y };

// Linear luma multiplier swept along one axis. (1,1) is the identity.
struct Lighting {
    double startFactor = 1.0;
    double endFactor = 1.0;
    Axis axis = Axis::X;
};

// Paper-colored stripe painted through the marker bbox after everything else.
struct Occluder {
    double angleDeg = 0.0;
    double widthFraction = 0.15; // of the marker bbox height
};

struct Placement {
    MarkerKind kind = MarkerKind::Artcode;
    std::string payload;      // code string for Artcode, 4-digit hex for GridTag
    double centerX = 0.5;     // fractional canvas coordinates
    double centerY = 0.5;
    double heightFraction = 0.3;
    std::optional<Occluder> occluder;
};

struct SceneBackground {
    bool clutter = false;
    double density = 0.0; // distractors per kilopixel
};

struct SceneSpec {
    int width = 768;
    int height = 768;
    SceneBackground background;
    Lighting lighting;
    std::vector<Placement> placements;
};

struct GroundTruthEntry {
    MarkerKind kind = MarkerKind::Artcode;
    std::string payload;
    Box bbox; // exact ink extent of the rendered marker
    bool occluded = false;
};
using GroundTruth = std::vector<GroundTruthEntry>;

struct SequenceSpec {
    int frames = 5;
    double startHeightFraction = 0.05;
    double endHeightFraction = 0.45;
};

class OverlappingPlacementsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ComposedScene {
    PixelGrid image;
    GroundTruth truth;
};

// Deterministic for (spec, seed). Markers are rendered at canonical
// resolution and area-downscaled to their placement size, reproducing the
// detail loss of a distant camera; lighting multiplies the finished canvas
// and occluders go on last.
ComposedScene compose_scene(const SceneSpec& spec, std::uint64_t seed);

// Far-to-near ramp: the single placement's heightFraction is geometrically
// interpolated from start to end; everything else (seed included) is fixed.
std::vector<ComposedScene> approach_sequence(const SceneSpec& scene, const SequenceSpec& seq,
                                             std::uint64_t seed);

// Balanced labeled windows for classifier training: background crops plus
// marker renders at jittered scale (0.5-0.95 of the window) and lighting.
std::vector<LabeledSample> emit_corpus(int numPerKind, int windowPx, std::uint64_t seed);

// Corpus for the sliding-window detector: emit_corpus samples plus partial
// views of markers larger than the window, so that sub-window crops of a big
// marker still identify as their family. This is what `train` feeds the
// scan-time classifier.
std::vector<LabeledSample> emit_detection_corpus(int numPerKind, int windowPx,
                                                 std::uint64_t seed);

// JSON spec wire format (CLI `synth` input); field names mirror the types.
SceneSpec scene_spec_from_json(const std::string& text);
SequenceSpec sequence_spec_from_json(const std::string& text);
std::string ground_truth_to_json(const GroundTruth& truth);

} // namespace markerforge
