#ifndef STANCETK_SVM_HPP
#define STANCETK_SVM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "stancetk/corpus.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/features.hpp"
#include "stancetk/rng.hpp"

namespace stancetk {

enum class ClassifierKind { Svm, Tree, Forest };

inline const char* classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Svm: return "svm";
        case ClassifierKind::Tree: return "tree";
        case ClassifierKind::Forest: return "forest";
    }
    return "?";
}

inline std::optional<ClassifierKind> classifier_from_name(std::string_view s) {
    if (s == "svm") return ClassifierKind::Svm;
    if (s == "tree") return ClassifierKind::Tree;
    if (s == "forest") return ClassifierKind::Forest;
    return std::nullopt;
}

struct TrainConfig {
    ClassifierKind classifier = ClassifierKind::Svm;
    // SVM
    double C = 1.0;
    double tol = 1e-3;
    uint32_t max_epochs = 200;
    // trees
    uint32_t min_leaf = 2;
    std::optional<uint32_t> max_depth;
    // forest
    uint32_t n_trees = 100;
    bool bootstrap = true;
    uint32_t features_per_split = 0;  // 0 selects ceil(sqrt(dimension))
    uint64_t rng_seed = 1;
};

// Per-class solver diagnostics; in-memory only.
struct SvmClassMeta {
    uint32_t epochs_run = 0;
    double final_violation = 0.0;        // max projected-gradient violation
    double duality_gap = 0.0;            // primal - dual at termination
    std::vector<double> sweep_dual_objectives;
    std::vector<double> alphas;
};

struct LinearSvmModel {
    uint32_t dimension = 0;
    std::array<std::vector<double>, 3> weights;  // per class, size = dimension
    std::array<double, 3> bias{0, 0, 0};
    double C = 1.0;
    std::array<SvmClassMeta, 3> meta;
};

namespace detail {

struct SparseRow {
    std::vector<std::pair<uint32_t, double>> values;  // includes augmented bias feature
    double squared_norm = 0.0;
};

inline std::vector<SparseRow> augmented_rows(const FeatureMatrix& matrix) {
    std::vector<SparseRow> rows;
    rows.reserve(matrix.rows.size());
    for (const auto& r : matrix.rows) {
        SparseRow row;
        row.values.reserve(r.vec.entries.size() + 1);
        for (const auto& [index, weight] : r.vec.entries) row.values.emplace_back(index, weight);
        row.values.emplace_back(matrix.dimension, 1.0);  // bias feature
        for (const auto& [index, weight] : row.values) {
            (void)index;
            row.squared_norm += weight * weight;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

// One-vs-rest L1-hinge soft-margin SVM solved by dual coordinate descent
// (Hsieh et al. style): alphas stay in [0,C], instances are swept in
// seeded-shuffled order, and the sweep stops when the largest projected
// gradient violation drops below tol.
inline LinearSvmModel svm_train(const FeatureMatrix& matrix, const TrainConfig& cfg) {
    if (matrix.rows.empty()) throw std::invalid_argument("empty training matrix");
    std::array<size_t, 3> present{0, 0, 0};
    for (const auto& row : matrix.rows) present[label_index(row.label)]++;
    if (std::count_if(present.begin(), present.end(), [](size_t c) { return c > 0; }) < 2)
        throw SingleClassInput("training data contains a single class");

    const auto rows = detail::augmented_rows(matrix);
    const size_t n = rows.size();
    const size_t dim = matrix.dimension + 1;

    LinearSvmModel model;
    model.dimension = matrix.dimension;
    model.C = cfg.C;

    for (size_t c = 0; c < 3; ++c) {
        std::vector<double> y(n);
        for (size_t i = 0; i < n; ++i)
            y[i] = label_index(matrix.rows[i].label) == c ? 1.0 : -1.0;

        std::vector<double> w(dim, 0.0);
        std::vector<double> alpha(n, 0.0);
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(cfg.rng_seed, c));

        SvmClassMeta& meta = model.meta[c];
        const auto dot = [&](const detail::SparseRow& row) {
            double s = 0;
            for (const auto& [index, weight] : row.values) s += w[index] * weight;
            return s;
        };

        for (uint32_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
            rng.shuffle(order);
            double max_violation = 0.0;
            for (const size_t i : order) {
                const double g = y[i] * dot(rows[i]) - 1.0;
                double pg = g;
                if (alpha[i] <= 0.0)
                    pg = std::min(g, 0.0);
                else if (alpha[i] >= cfg.C)
                    pg = std::max(g, 0.0);
                max_violation = std::max(max_violation, std::abs(pg));
                if (pg != 0.0) {
                    const double old = alpha[i];
                    alpha[i] = std::clamp(old - g / rows[i].squared_norm, 0.0, cfg.C);
                    const double delta = (alpha[i] - old) * y[i];
                    if (delta != 0.0)
                        for (const auto& [index, weight] : rows[i].values)
                            w[index] += delta * weight;
                }
            }
            meta.epochs_run = epoch + 1;
            meta.final_violation = max_violation;
            double w_sq = 0;
            for (double v : w) w_sq += v * v;
            meta.sweep_dual_objectives.push_back(
                std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * w_sq);
            if (max_violation < cfg.tol) break;
        }

        // Duality gap at termination.
        double hinge = 0;
        for (size_t i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - y[i] * dot(rows[i]));
        double w_sq = 0;
        for (double v : w) w_sq += v * v;
        const double primal = 0.5 * w_sq + cfg.C * hinge;
        const double dual = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * w_sq;
        meta.duality_gap = primal - dual;
        meta.alphas = std::move(alpha);

        model.weights[c].assign(w.begin(), w.begin() + matrix.dimension);
        model.bias[c] = w[matrix.dimension];
    }
    return model;
}

struct SvmPrediction {
    ClassLabel label = ClassLabel::Yes;
    std::array<double, 3> scores{0, 0, 0};
};

inline SvmPrediction svm_predict(const LinearSvmModel& model, const FeatureVector& v) {
    if (v.dimension != model.dimension)
        throw DimensionMismatch("vector dimension " + std::to_string(v.dimension) +
                                " != model dimension " + std::to_string(model.dimension));
    SvmPrediction out;
    for (size_t c = 0; c < 3; ++c) {
        double s = model.bias[c];
        for (const auto& [index, weight] : v.entries) s += model.weights[c][index] * weight;
        out.scores[c] = s;
    }
    size_t best = 0;
    for (size_t c = 1; c < 3; ++c)
        if (out.scores[c] > out.scores[best]) best = c;  // ties keep label order
    out.label = static_cast<ClassLabel>(best);
    return out;
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

inline void write_svm_model(const LinearSvmModel& model, std::ostream& out) {
    out << "stancetk-svm v1\n";
    out << "dimension " << model.dimension << '\n';
    out << "C " << detail::format_double(model.C) << '\n';
    for (size_t c = 0; c < 3; ++c) {
        out << "class " << label_name(static_cast<ClassLabel>(c)) << '\n';
        out << "bias " << detail::format_double(model.bias[c]) << '\n';
        out << "weights";
        for (double w : model.weights[c]) out << ' ' << detail::format_double(w);
        out << '\n';
    }
}

inline void write_svm_model(const LinearSvmModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write SVM model " + path);
    write_svm_model(model, out);
}

inline LinearSvmModel read_svm_model(std::istream& in, const std::string& source) {
    const auto fail = [&](const std::string& why) -> MalformedRecord {
        return MalformedRecord(source + ": " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "stancetk-svm v1") throw fail("bad model header");
    LinearSvmModel model;
    std::string key;
    in >> key >> model.dimension;
    if (key != "dimension") throw fail("expected dimension");
    in >> key >> model.C;
    if (key != "C") throw fail("expected C");
    for (size_t c = 0; c < 3; ++c) {
        std::string name;
        in >> key >> name;
        if (key != "class" || name != label_name(static_cast<ClassLabel>(c)))
            throw fail("expected class " + std::string(label_name(static_cast<ClassLabel>(c))));
        in >> key >> model.bias[c];
        if (key != "bias") throw fail("expected bias");
        in >> key;
        if (key != "weights") throw fail("expected weights");
        model.weights[c].resize(model.dimension);
        for (auto& w : model.weights[c])
            if (!(in >> w)) throw fail("truncated weights");
    }
    return model;
}

inline LinearSvmModel read_svm_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open SVM model " + path);
    return read_svm_model(in, path);
}

} // namespace stancetk

#endif // STANCETK_SVM_HPP
