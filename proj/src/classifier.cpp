#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "markerforge/detector.hpp"

namespace markerforge {

namespace {

std::array<double, 9> standardized(const FeatureVector& f, const std::array<double, 8>& means,
                                   const std::array<double, 8>& stds) {
    std::array<double, 9> z;
    for (int j = 0; j < 8; ++j) z[j] = (f.values[j] - means[j]) / stds[j];
    z[8] = 1.0; // bias input
    return z;
}

std::array<double, 3> softmax(const std::array<double, 3>& logits) {
    const double m = std::max({logits[0], logits[1], logits[2]});
    std::array<double, 3> e;
    double sum = 0;
    for (int k = 0; k < 3; ++k) sum += e[k] = std::exp(logits[k] - m);
    for (int k = 0; k < 3; ++k) e[k] /= sum;
    return e;
}

std::array<double, 3> probabilities(const WeightMatrix& w, const std::array<double, 9>& z) {
    std::array<double, 3> logits{};
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 9; ++j) logits[k] += w[k][j] * z[j];
    return softmax(logits);
}

} // namespace

double cross_entropy(const WeightMatrix& weights, const std::vector<LabeledSample>& samples,
                     const std::array<double, 8>& means, const std::array<double, 8>& stds) {
    double loss = 0;
    for (const auto& [f, kind] : samples) {
        const auto p = probabilities(weights, standardized(f, means, stds));
        loss -= std::log(std::max(p[static_cast<int>(kind)], 1e-300));
    }
    return loss / samples.size();
}

WeightMatrix cross_entropy_gradient(const WeightMatrix& weights,
                                    const std::vector<LabeledSample>& samples,
                                    const std::array<double, 8>& means,
                                    const std::array<double, 8>& stds) {
    WeightMatrix grad{};
    for (const auto& [f, kind] : samples) {
        const auto z = standardized(f, means, stds);
        auto p = probabilities(weights, z);
        p[static_cast<int>(kind)] -= 1.0;
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 9; ++j) grad[k][j] += p[k] * z[j];
    }
    for (auto& row : grad)
        for (double& g : row) g /= samples.size();
    return grad;
}

ClassifierModel train_classifier(const std::vector<LabeledSample>& samples,
                                 const TrainHyper& hyper) {
    std::array<int, 3> perKind{};
    for (const auto& [f, kind] : samples) ++perKind[static_cast<int>(kind)];
    for (int k = 0; k < 3; ++k) {
        if (perKind[k] == 0)
            throw MissingKindError(std::string("no training sample of kind ") +
                                   kind_name(static_cast<MarkerKind>(k)));
    }

    ClassifierModel model;
    model.trainingSeed = hyper.seed;
    const double n = static_cast<double>(samples.size());
    for (int j = 0; j < 8; ++j) {
        double sum = 0;
        for (const auto& [f, kind] : samples) sum += f.values[j];
        model.featureMeans[j] = sum / n;
        double var = 0;
        for (const auto& [f, kind] : samples) {
            const double d = f.values[j] - model.featureMeans[j];
            var += d * d;
        }
        model.featureStds[j] = std::max(std::sqrt(var / n), 1e-6);
    }

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const WeightMatrix grad =
            cross_entropy_gradient(model.weights, samples, model.featureMeans, model.featureStds);
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 9; ++j) model.weights[k][j] -= hyper.learningRate * grad[k][j];
    }
    return model;
}

std::array<double, 3> classify(const ClassifierModel& model, const FeatureVector& f) {
    return probabilities(model.weights, standardized(f, model.featureMeans, model.featureStds));
}

// ---------------------------------------------------------------------------
// Model file format
// ---------------------------------------------------------------------------

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename It>
std::string num_array(It begin, It end) {
    std::string out = "[";
    for (It it = begin; it != end; ++it) {
        if (it != begin) out += ", ";
        out += num17(*it);
    }
    return out + "]";
}

} // namespace

std::string model_to_json(const ClassifierModel& model) {
    std::ostringstream out;
    out << "{\n  \"featureNames\": [";
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
        out << (i ? ", " : "") << '"' << kFeatureNames[i] << '"';
    out << "],\n  \"kindNames\": [\"background\", \"artcode\", \"gridtag\"],\n";
    out << "  \"means\": " << num_array(model.featureMeans.begin(), model.featureMeans.end())
        << ",\n";
    out << "  \"stds\": " << num_array(model.featureStds.begin(), model.featureStds.end())
        << ",\n  \"weights\": [";
    for (int k = 0; k < 3; ++k) {
        out << (k ? ", " : "") << num_array(model.weights[k].begin(), model.weights[k].end());
    }
    out << "],\n  \"trainingSeed\": " << model.trainingSeed << "\n}\n";
    return out.str();
}

ClassifierModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const auto& names = doc.at("featureNames");
        const auto& kinds = doc.at("kindNames");
        const auto& means = doc.at("means");
        const auto& stds = doc.at("stds");
        const auto& weights = doc.at("weights");
        if (names.size() != 8 || kinds.size() != 3 || means.size() != 8 || stds.size() != 8 ||
            weights.size() != 3)
            throw ModelFormatError("model arity mismatch");
        ClassifierModel model;
        for (int j = 0; j < 8; ++j) {
            model.featureMeans[j] = means.at(j).get<double>();
            model.featureStds[j] = stds.at(j).get<double>();
        }
        for (int k = 0; k < 3; ++k) {
            if (weights.at(k).size() != 9) throw ModelFormatError("weight row arity mismatch");
            for (int j = 0; j < 9; ++j) model.weights[k][j] = weights.at(k).at(j).get<double>();
        }
        model.trainingSeed = doc.value("trainingSeed", 0ull);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("model document malformed: ") + e.what());
    }
}

void save_model(const ClassifierModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json(model);
}

ClassifierModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace markerforge
