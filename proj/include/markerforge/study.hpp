#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "markerforge/pipeline.hpp"
#include "markerforge/scenegen.hpp"

namespace markerforge {

enum class StudyVariant { Simple, Hard };

// The two reproduction studies: a five-frame approach sequence scanned frame
// by frame. Scene parameters and the height-fraction ramp are frozen from a
// one-time calibration sweep; see tests/acceptance.cpp.
struct StudyConfig {
    StudyVariant variant = StudyVariant::Simple;
    std::uint64_t seed = 0;
    std::string outputDir;
    std::string modelPath;

    int canvasPx = 768;
    std::string code;
    SceneSpec scene;         // single placement, heightFraction filled per frame
    SequenceSpec sequence;

    static StudyConfig simple(std::uint64_t seed, const std::string& outDir);
    static StudyConfig hard(std::uint64_t seed, const std::string& outDir);
};

struct StudyFrameResult {
    int frame = 0; // 1-based, far to near
    double heightFraction = 0;
    bool decoded = false;      // planted code recovered
    double topIoU = 0;         // best-scoring candidate vs ground truth
    bool heatPeakHit = false;  // heat argmax inside the 0.1-padded GT bbox
    std::int64_t elapsedMs = 0;
};

struct StudyReport {
    StudyVariant variant = StudyVariant::Simple;
    std::vector<StudyFrameResult> frames; // ordered far to near
    bool patternMet = false;
};

class ModelMissingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Writes frame{i}_{input,proposal,gray,fused}.p{g,p}m for each frame plus
// report.json into cfg.outputDir. Pattern: Simple expects x,x,ok,ok,ok;
// Hard expects all five failing with heat peaks on target in >= 4 frames.
StudyReport run_study(const StudyConfig& cfg);

std::string study_report_to_json(const StudyConfig& cfg, const StudyReport& report);

} // namespace markerforge
