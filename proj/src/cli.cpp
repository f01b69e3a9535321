#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "markerforge/cli.hpp"
#include "markerforge/gridtag.hpp"
#include "markerforge/pipeline.hpp"
#include "markerforge/study.hpp"

namespace markerforge {

namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

PixelGrid load_grid(const std::string& path) { return to_luminance(read_pnm(read_file(path))); }

void write_grid(const std::string& path, const PixelGrid& grid) {
    write_file(path, write_pnm({grid.width, grid.height, 1, grid.luma}));
}

ValidationPolicy policy_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    ValidationPolicy policy;
    policy.minBranches = doc.value("minBranches", policy.minBranches);
    policy.maxBranches = doc.value("maxBranches", policy.maxBranches);
    policy.minLeavesPerBranch = doc.value("minLeavesPerBranch", policy.minLeavesPerBranch);
    policy.maxLeavesPerBranch = doc.value("maxLeavesPerBranch", policy.maxLeavesPerBranch);
    if (doc.contains("checksumModulus") && !doc.at("checksumModulus").is_null())
        policy.checksumModulus = doc.at("checksumModulus").get<int>();
    return policy;
}

std::vector<int> parse_scales(const std::string& csv) {
    std::vector<int> scales;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) scales.push_back(std::stoi(item));
    return scales;
}

PixelGrid heat_to_gray(const PresenceHeatMap& heat) {
    PixelGrid gray(heat.width, heat.height);
    for (std::size_t i = 0; i < gray.luma.size(); ++i)
        gray.luma[i] = static_cast<std::uint8_t>(std::lround(heat.intensity[i] * 255));
    return gray;
}

ClassifierModel train_model(int numPerKind, const std::vector<int>& windows, std::uint64_t seed,
                            double lr, int epochs) {
    std::vector<LabeledSample> corpus;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        auto part = emit_detection_corpus(numPerKind, windows[i], seed + i);
        corpus.insert(corpus.end(), part.begin(), part.end());
    }
    return train_classifier(corpus, {lr, epochs, seed});
}

DecoderPool stock_pool(const ValidationPolicy& policy) {
    DecoderPool pool;
    pool = register_decoder(std::move(pool), MarkerKind::Artcode, make_artcode_decoder(policy));
    pool = register_decoder(std::move(pool), MarkerKind::GridTag, make_gridtag_decoder());
    return pool;
}

// Full-image decode without a model: Artcode extraction first, GridTag as
// the fallback family. Returns printed payloads.
std::vector<std::string> direct_decode(const PixelGrid& grid, const ValidationPolicy& policy) {
    std::vector<std::string> out;
    const auto tree = build_rat(label_components(adaptive_threshold(grid)));
    for (const ArtcodeCandidate& cand : extract_artcodes(tree, policy))
        out.push_back(format_code(cand.descriptor));
    if (!out.empty()) return out;

    const DecodeOutcome tag = make_gridtag_decoder()(grid, {0, 0, grid.width, grid.height});
    if (tag.status == DecodeStatus::Decoded) out.push_back(tag.payload);
    return out;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"markerforge: visual marker generation, detection and decoding"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "global RNG seed")->envname("MARKERFORGE_SEED");

    // generate
    auto* generate = app.add_subcommand("generate", "render a marker image");
    generate->require_subcommand(1);
    std::string genCode = "1:1:2:4:4", genOut = "marker.pgm", genData = "0000";
    int genSize = 512, genModulePx = 8;
    auto* genArt = generate->add_subcommand("artcode", "render an Artcode");
    genArt->add_option("--code", genCode, "code string, e.g. 1:1:2:4:4");
    genArt->add_option("--size", genSize, "canvas pixels (>= 64)");
    genArt->add_option("-o,--out", genOut, "output PGM path");
    auto* genTag = generate->add_subcommand("gridtag", "render a GridTag");
    genTag->add_option("--data", genData, "payload as 4-digit hex");
    genTag->add_option("--module-px", genModulePx, "pixels per module (>= 2)");
    genTag->add_option("-o,--out", genOut, "output PGM path");

    // train
    auto* train = app.add_subcommand("train", "train the marker classifier on synthetic windows");
    std::string trainOut = "model.json", trainWindows = "64,128,256";
    int trainPerKind = 200, trainEpochs = 500;
    double trainLr = 0.1;
    train->add_option("-o,--out", trainOut, "model JSON path");
    train->add_option("--num-per-kind", trainPerKind, "samples per kind per window scale");
    train->add_option("--window-px", trainWindows, "CSV of window sizes");
    train->add_option("--lr", trainLr, "learning rate");
    train->add_option("--epochs", trainEpochs, "gradient descent epochs");

    // scan
    auto* scan = app.add_subcommand("scan", "run the full recognition pipeline on an image");
    std::string scanImage, scanModel, scanOut = ".", scanScales = "64,128,256", scanPolicy;
    double scanThreshold = 0.5, scanNmsIou = 0.4, scanAlpha = 0.6;
    scan->add_option("image", scanImage, "input PNM image")->required();
    scan->add_option("--model", scanModel, "classifier model JSON")->required();
    scan->add_option("--out", scanOut, "output directory");
    scan->add_option("--window-scales", scanScales, "CSV of window sides");
    scan->add_option("--threshold", scanThreshold, "candidate score threshold");
    scan->add_option("--nms-iou", scanNmsIou, "suppression IoU threshold");
    scan->add_option("--alpha", scanAlpha, "fusion alpha");
    scan->add_option("--policy", scanPolicy, "Artcode validation policy as inline JSON");

    // decode
    auto* decode = app.add_subcommand("decode", "decode markers in a full image, no model needed");
    std::string decodeImage, decodePolicy;
    decode->add_option("image", decodeImage, "input PNM image")->required();
    decode->add_option("--policy", decodePolicy, "Artcode validation policy as inline JSON");

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic scenes");
    synth->require_subcommand(1);
    std::string synthSpec, synthSeq, synthOut = ".";
    auto* synthScene = synth->add_subcommand("scene", "compose one scene from a JSON spec");
    synthScene->add_option("--spec", synthSpec, "SceneSpec JSON file")->required();
    synthScene->add_option("--out", synthOut, "output directory");
    auto* synthSequence = synth->add_subcommand("sequence", "compose an approach sequence");
    synthSequence->add_option("--spec", synthSpec, "SceneSpec JSON file")->required();
    synthSequence->add_option("--sequence", synthSeq, "SequenceSpec JSON file")->required();
    synthSequence->add_option("--out", synthOut, "output directory");

    // study
    auto* study = app.add_subcommand("study", "reproduce the approach-distance studies");
    study->require_subcommand(1);
    std::string studyOut = "study", studyModel;
    bool trainFirst = false;
    auto* studySimple = study->add_subcommand("simple", "plain scene, good lighting");
    auto* studyHard = study->add_subcommand("hard", "clutter, shading, occlusion");
    for (auto* variant : {studySimple, studyHard}) {
        variant->add_option("--out", studyOut, "output directory");
        variant->add_option("--model", studyModel, "classifier model JSON");
        variant->add_flag("--train-first", trainFirst, "train a model into the output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (genArt->parsed()) {
            ArtcodeDescriptor d;
            try {
                d = parse_code(genCode);
            } catch (const CodeParseError& e) {
                throw UsageError(std::string("--code: ") + e.what());
            }
            write_grid(genOut, render_artcode(d, genSize, seed));
            std::cout << genOut << "\n";
            return 0;
        }
        if (genTag->parsed()) {
            unsigned long value = 0;
            try {
                std::size_t used = 0;
                value = std::stoul(genData, &used, 16);
                if (used != genData.size() || value > 0xFFFF) throw std::invalid_argument(genData);
            } catch (const std::exception&) {
                throw UsageError("--data must be a 16-bit hex value");
            }
            write_grid(genOut, render_gridtag(
                                   encode_gridtag({static_cast<std::uint16_t>(value)}), genModulePx));
            std::cout << genOut << "\n";
            return 0;
        }
        if (train->parsed()) {
            const ClassifierModel model =
                train_model(trainPerKind, parse_scales(trainWindows), seed, trainLr, trainEpochs);
            save_model(model, trainOut);
            std::cout << trainOut << "\n";
            return 0;
        }
        if (scan->parsed()) {
            const PixelGrid grid = load_grid(scanImage);
            const ClassifierModel model = load_model(scanModel);
            UrfConfig cfg;
            cfg.windowSpec.scales = parse_scales(scanScales);
            cfg.windowSpec.scoreThreshold = scanThreshold;
            cfg.nmsIou = scanNmsIou;
            cfg.alpha = scanAlpha;
            if (!scanPolicy.empty()) cfg.validationPolicy = policy_from_json(scanPolicy);

            fs::create_directories(scanOut);
            UrfResult result = run_urf(grid, model, stock_pool(cfg.validationPolicy), cfg,
                                       fs::path(scanImage).filename().string());
            result.report.heatMapRef = scanOut + "/heat.pgm";
            write_grid(result.report.heatMapRef, heat_to_gray(result.heat));
            std::vector<Box> boxes;
            int decoded = 0;
            for (const ReportedCandidate& cand : result.report.candidates) {
                boxes.push_back(cand.bbox);
                if (cand.outcome && cand.outcome->status == DecodeStatus::Decoded) ++decoded;
            }
            write_file(scanOut + "/proposal.ppm",
                       write_pnm(annotate_boxes(to_rgb(grid), boxes, 3)));
            write_file(scanOut + "/fused.ppm", write_pnm(fuse_overlay(grid, result.heat, cfg.alpha)));
            write_text(scanOut + "/report.json", report_to_json(result.report));
            std::cout << scanOut + "/report.json" << "\n";
            if (decoded == 0) {
                std::cerr << "scan completed: no markers decoded\n";
                return 3;
            }
            return 0;
        }
        if (decode->parsed()) {
            ValidationPolicy policy;
            if (!decodePolicy.empty()) policy = policy_from_json(decodePolicy);
            const auto payloads = direct_decode(load_grid(decodeImage), policy);
            for (const std::string& p : payloads) std::cout << p << "\n";
            if (payloads.empty()) {
                std::cerr << "no decodable marker found\n";
                return 3;
            }
            return 0;
        }
        if (synthScene->parsed()) {
            const auto specBytes = read_file(synthSpec);
            const SceneSpec spec =
                scene_spec_from_json(std::string(specBytes.begin(), specBytes.end()));
            fs::create_directories(synthOut);
            const ComposedScene scene = compose_scene(spec, seed);
            write_grid(synthOut + "/scene.pgm", scene.image);
            write_text(synthOut + "/truth.json", ground_truth_to_json(scene.truth));
            std::cout << synthOut + "/truth.json" << "\n";
            return 0;
        }
        if (synthSequence->parsed()) {
            const auto specBytes = read_file(synthSpec);
            const auto seqBytes = read_file(synthSeq);
            const SceneSpec spec = scene_spec_from_json(
                std::string(specBytes.begin(), specBytes.end()));
            const SequenceSpec seq =
                sequence_spec_from_json(std::string(seqBytes.begin(), seqBytes.end()));
            fs::create_directories(synthOut);
            const auto frames = approach_sequence(spec, seq, seed);
            for (std::size_t i = 0; i < frames.size(); ++i) {
                const std::string stem = synthOut + "/frame" + std::to_string(i + 1);
                write_grid(stem + ".pgm", frames[i].image);
                write_text(stem + "_truth.json", ground_truth_to_json(frames[i].truth));
            }
            std::cout << synthOut << "\n";
            return 0;
        }
        if (studySimple->parsed() || studyHard->parsed()) {
            StudyConfig cfg = studySimple->parsed() ? StudyConfig::simple(seed, studyOut)
                                                    : StudyConfig::hard(seed, studyOut);
            if (trainFirst) {
                fs::create_directories(studyOut);
                cfg.modelPath = studyOut + "/model.json";
                save_model(train_model(200, {64, 128, 256}, seed, 0.1, 500), cfg.modelPath);
            } else {
                cfg.modelPath = studyModel;
            }
            const StudyReport report = run_study(cfg);
            std::cout << cfg.outputDir + "/report.json" << "\n";
            return report.patternMet ? 0 : 3;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"markerforge"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace markerforge
