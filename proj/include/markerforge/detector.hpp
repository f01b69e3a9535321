#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerforge/image.hpp"
#include "markerforge/regions.hpp"

namespace markerforge {

enum class MarkerKind : int { Background = 0, Artcode = 1, GridTag = 2 };
constexpr int kKindCount = 3;

const char* kind_name(MarkerKind kind);

// Hand-crafted window features. f1/f7/f8 are plain functions of the window
// luma (f1 counts pixels under the 128 midpoint); f2..f6 come from the
// thresholded region tree built with the module defaults:
//   f1 ink fraction                 f5 max RAT depth / 5, capped at 1
//   f2 components per kilopixel     f6 depth-3 chains per kilopixel
//   f3 mean holes per ink component f7 gradient-edge density (|grad| > 24)
//   f4 childless component fraction f8 luma variance / 128^2
struct FeatureVector {
    std::array<double, 8> values{};

    double operator[](std::size_t i) const { return values[i]; }
};
constexpr std::array<const char*, 8> kFeatureNames = {
    "ink_fraction",        "components_per_kilopixel",
    "mean_holes_per_ink_component", "leaf_component_fraction",
    "max_depth_over_five", "depth3_chains_per_kilopixel",
    "gradient_edge_density", "luma_variance_norm",
};

// Multinomial logistic regression over standardized features.
struct ClassifierModel {
    std::array<std::array<double, 9>, 3> weights{}; // per kind: 8 features + bias
    std::array<double, 8> featureMeans{};
    std::array<double, 8> featureStds{};
    std::uint64_t trainingSeed = 0;
};

struct CandidateBox {
    Box bbox;
    std::array<double, 3> scores{}; // per MarkerKind, sums to 1
    MarkerKind predictedKind = MarkerKind::Background;

    double top_non_background() const { return std::max(scores[1], scores[2]); }
};

struct PresenceHeatMap {
    int width = 0;
    int height = 0;
    std::vector<double> intensity; // in [0,1]

    double at(int x, int y) const { return intensity[static_cast<std::size_t>(y) * width + x]; }
};

struct WindowSpec {
    std::vector<int> scales = {64, 128, 256}; // window side lengths, each >= 32
    double strideFraction = 0.25;             // stride = max(1, round(side * fraction))
    double scoreThreshold = 0.5;              // on the top non-background score
};

struct TrainHyper {
    double learningRate = 0.1;
    int epochs = 500;
    std::uint64_t seed = 0; // reserved for shuffling; unused by full-batch descent
};

class MissingKindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ImageTooSmallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DimensionMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NotRgbError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using LabeledSample = std::pair<FeatureVector, MarkerKind>;

FeatureVector extract_features(const PixelGrid& grid, const Box& box);

ClassifierModel train_classifier(const std::vector<LabeledSample>& samples,
                                 const TrainHyper& hyper = {});

std::array<double, 3> classify(const ClassifierModel& model, const FeatureVector& f);

std::vector<CandidateBox> scan_windows(const PixelGrid& grid, const ClassifierModel& model,
                                       const WindowSpec& spec);

// Greedy non-maximum suppression by descending top non-background score;
// only boxes of the same predicted kind suppress each other.
std::vector<CandidateBox> suppress(const std::vector<CandidateBox>& cands, double iouThreshold);

// raw(p) = sum over covering candidates of (1 - backgroundScore), normalized
// by the global max (all zeros when no candidate covers anything).
PresenceHeatMap accumulate_heatmap(const std::vector<CandidateBox>& cands, int width, int height);

// out = (1 - alpha*h) * gray + alpha*h * (255, 64, 0)
RasterImage fuse_overlay(const PixelGrid& grid, const PresenceHeatMap& heat, double alpha = 0.6);

// Yellow rectangle outlines, clipped to the image; later boxes draw on top.
RasterImage annotate_boxes(const RasterImage& img, const std::vector<Box>& boxes, int thickness);

// --- training internals, exposed for the gradient oracle ---------------------

using WeightMatrix = std::array<std::array<double, 9>, 3>;

// Mean multinomial cross-entropy over samples standardized by means/stds.
double cross_entropy(const WeightMatrix& weights, const std::vector<LabeledSample>& samples,
                     const std::array<double, 8>& means, const std::array<double, 8>& stds);

WeightMatrix cross_entropy_gradient(const WeightMatrix& weights,
                                    const std::vector<LabeledSample>& samples,
                                    const std::array<double, 8>& means,
                                    const std::array<double, 8>& stds);

// --- model file I/O -----------------------------------------------------------

// Single JSON document; numbers carry 17 significant digits so reload is
// bit-exact. The loader rejects wrong arity.
std::string model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const std::string& text);
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

} // namespace markerforge
