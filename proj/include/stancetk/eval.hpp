#ifndef STANCETK_EVAL_HPP
#define STANCETK_EVAL_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "stancetk/baseline.hpp"
#include "stancetk/corpus.hpp"
#include "stancetk/discovery.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/features.hpp"
#include "stancetk/lda.hpp"
#include "stancetk/rng.hpp"
#include "stancetk/svm.hpp"
#include "stancetk/tree.hpp"

namespace stancetk {

// ---------------------------------------------------------------------------
// Confusion matrix and metrics
// ---------------------------------------------------------------------------

// Rows are the true label, columns the prediction, in Yes/No/Ambiguous order.
struct ConfusionMatrix {
    std::array<std::array<uint64_t, 3>, 3> counts{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};

    void add(ClassLabel truth, ClassLabel predicted, uint64_t n = 1) {
        counts[label_index(truth)][label_index(predicted)] += n;
    }

    uint64_t total() const {
        uint64_t t = 0;
        for (const auto& row : counts)
            for (const uint64_t c : row) t += c;
        return t;
    }

    uint64_t trace() const { return counts[0][0] + counts[1][1] + counts[2][2]; }

    void merge(const ConfusionMatrix& other) {
        for (size_t r = 0; r < 3; ++r)
            for (size_t c = 0; c < 3; ++c) counts[r][c] += other.counts[r][c];
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

inline double accuracy(const ConfusionMatrix& m) {
    const uint64_t total = m.total();
    if (total == 0) throw EmptyMatrix("confusion matrix has no instances");
    return static_cast<double>(m.trace()) / static_cast<double>(total);
}

// 0/0 cells report as nullopt.
struct PerClassMetrics {
    std::array<std::optional<double>, 3> precision;
    std::array<std::optional<double>, 3> recall;
};

inline PerClassMetrics per_class_metrics(const ConfusionMatrix& m) {
    if (m.total() == 0) throw EmptyMatrix("confusion matrix has no instances");
    PerClassMetrics out;
    for (size_t c = 0; c < 3; ++c) {
        uint64_t row = 0;
        uint64_t col = 0;
        for (size_t i = 0; i < 3; ++i) {
            row += m.counts[c][i];
            col += m.counts[i][c];
        }
        const auto diag = static_cast<double>(m.counts[c][c]);
        if (row > 0) out.recall[c] = diag / static_cast<double>(row);
        if (col > 0) out.precision[c] = diag / static_cast<double>(col);
    }
    return out;
}

inline void write_confusion(const ConfusionMatrix& m, std::ostream& out) {
    for (size_t r = 0; r < 3; ++r) {
        for (size_t c = 0; c < 3; ++c) {
            if (c) out << ' ';
            out << m.counts[r][c];
        }
        out << '\n';
    }
}

inline void write_confusion(const ConfusionMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write confusion matrix " + path);
    write_confusion(m, out);
}

// ---------------------------------------------------------------------------
// Stratified folds
// ---------------------------------------------------------------------------

struct FoldAssignment {
    uint32_t k_folds = 0;
    std::unordered_map<std::string, uint32_t> fold_of;
    uint64_t rng_seed = 0;
};

// Within each class: seeded shuffle, then round-robin. The fold cursor
// continues across classes so fold totals stay balanced, not just the
// per-class counts.
inline FoldAssignment stratified_folds(const LabeledCorpus& corpus, uint32_t k,
                                       uint64_t rng_seed) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    if (corpus.documents.empty()) throw TooFewInstances("corpus has no documents");

    FoldAssignment folds;
    folds.k_folds = k;
    folds.rng_seed = rng_seed;

    Rng rng(rng_seed);
    size_t cursor = 0;
    for (const ClassLabel label : kAllLabels) {
        std::vector<const std::string*> members;
        for (const auto& doc : corpus.documents)
            if (doc.label == label) members.push_back(&doc.user_id);
        rng.shuffle(members);
        for (const auto* user : members) {
            folds.fold_of.emplace(*user, static_cast<uint32_t>(cursor % k));
            ++cursor;
        }
    }
    return folds;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct LdaParams {
    uint32_t topics = 10;
    uint32_t iterations = 400;
    size_t dict_size = 100000;
    size_t sample_size = 100000;
    double alpha = 0.0;  // <= 0 selects 50/topics
    double beta = 0.01;
};

struct FeatureConfig {
    FeatureKind kind = FeatureKind::Hashtag;
    size_t k = 100;
    SeedSets seeds = default_seed_sets();
    LdaParams lda;
};

// Feature space (and idf table, for tfidf) built from one corpus slice.
struct FittedFeatures {
    FeatureSpace space;
    IdfTable idf;
};

inline FittedFeatures fit_features(const LabeledCorpus& train, const FeatureConfig& cfg,
                                   uint64_t seed) {
    FittedFeatures fitted;
    switch (cfg.kind) {
        case FeatureKind::Hashtag:
        case FeatureKind::Bow: {
            const auto index = index_token_tweets(train, cfg.seeds,
                                                  cfg.kind == FeatureKind::Hashtag
                                                      ? TokenKind::Hashtag
                                                      : TokenKind::Word);
            const auto [yes_ranked, no_ranked] = score_candidates(index);
            const auto [yes_list, no_list] = assign_disjoint(yes_ranked, no_ranked, cfg.seeds);
            fitted.space = build_feature_space(yes_list, no_list, cfg.k, cfg.kind);
            break;
        }
        case FeatureKind::Tfidf: {
            fitted.space = select_top_frequent_terms(train, cfg.k);
            fitted.idf = compute_idf(train, fitted.space);
            break;
        }
        case FeatureKind::Lda: {
            const LdaModel model =
                lda_train(train, cfg.lda.topics, cfg.lda.iterations, cfg.lda.dict_size,
                          cfg.lda.sample_size, cfg.lda.alpha, cfg.lda.beta, seed);
            fitted.space = lda_feature_space(model, cfg.k);
            break;
        }
    }
    return fitted;
}

// A trained predictor, abstracted so tests can substitute their own.
using Predictor = std::function<ClassLabel(const FeatureVector&)>;
using Trainer = std::function<Predictor(const FeatureMatrix&)>;

inline Trainer make_trainer(const TrainConfig& cfg) {
    return [cfg](const FeatureMatrix& matrix) -> Predictor {
        switch (cfg.classifier) {
            case ClassifierKind::Svm: {
                auto model = std::make_shared<LinearSvmModel>(svm_train(matrix, cfg));
                return [model](const FeatureVector& v) { return svm_predict(*model, v).label; };
            }
            case ClassifierKind::Tree: {
                auto model = std::make_shared<DecisionTreeModel>(tree_train(matrix, cfg));
                return [model](const FeatureVector& v) { return tree_predict(*model, v); };
            }
            case ClassifierKind::Forest: {
                auto model = std::make_shared<RandomForestModel>(forest_train(matrix, cfg));
                return [model](const FeatureVector& v) { return forest_predict(*model, v); };
            }
        }
        throw std::invalid_argument("unknown classifier");
    };
}

// Per-fold observer; receives the user ids the fold's artifacts were fit on.
using FoldObserver = std::function<void(uint32_t fold, const std::vector<std::string>& train_ids)>;

// Leakage-free protocol: feature discovery, idf statistics and LDA training
// see training folds only; all test predictions pool into one matrix.
inline ConfusionMatrix cross_validate(const LabeledCorpus& corpus, const FeatureConfig& fcfg,
                                      const Trainer& trainer, const FoldAssignment& folds,
                                      uint64_t seed, const FoldObserver& observer = nullptr) {
    ConfusionMatrix pooled;
    for (uint32_t f = 0; f < folds.k_folds; ++f) {
        LabeledCorpus train;
        std::vector<const UserDocument*> test_docs;
        for (const auto& doc : corpus.documents) {
            const auto it = folds.fold_of.find(doc.user_id);
            if (it == folds.fold_of.end() || it->second != f) {
                train.documents.push_back(doc);
                train.class_counts[label_index(doc.label)]++;
            } else {
                test_docs.push_back(&doc);
            }
        }
        if (test_docs.empty()) continue;

        if (observer) {
            std::vector<std::string> ids;
            ids.reserve(train.documents.size());
            for (const auto& doc : train.documents) ids.push_back(doc.user_id);
            observer(f, ids);
        }

        const uint64_t fold_seed = derive_seed(seed, f);
        const FittedFeatures fitted = fit_features(train, fcfg, fold_seed);
        const IdfTable* idf = fcfg.kind == FeatureKind::Tfidf ? &fitted.idf : nullptr;

        const FeatureMatrix train_matrix = vectorize_corpus(train, fitted.space, idf);
        const Predictor predict = trainer(train_matrix);
        for (const auto* doc : test_docs) {
            const FeatureVector v = fitted.space.kind == FeatureKind::Tfidf
                                        ? tfidf_vectorize(*doc, fitted.space, fitted.idf)
                                        : count_vectorize(*doc, fitted.space);
            pooled.add(doc->label, predict(v));
        }
    }
    return pooled;
}

inline ConfusionMatrix cross_validate(const LabeledCorpus& corpus, const FeatureConfig& fcfg,
                                      const TrainConfig& tcfg, const FoldAssignment& folds,
                                      const FoldObserver& observer = nullptr) {
    return cross_validate(corpus, fcfg, make_trainer(tcfg), folds, tcfg.rng_seed, observer);
}

// Baseline has no trained parameters; it runs on the full corpus.
inline ConfusionMatrix evaluate_baseline(const LabeledCorpus& corpus, const SeedSets& seeds) {
    ConfusionMatrix m;
    for (const auto& doc : corpus.documents) m.add(doc.label, baseline_classify(doc, seeds));
    return m;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    std::string kind;  // feature kind name, or "baseline"
    size_t k = 0;
    std::string classifier;
    double accuracy = 0.0;
    ConfusionMatrix matrix;
};

struct SweepExtremes {
    double min_accuracy = 0.0;
    size_t min_k = 0;
    double max_accuracy = 0.0;
    size_t max_k = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered (kind, k, classifier)
    std::map<std::pair<std::string, std::string>, SweepExtremes> extremes;
};

struct SweepSpec {
    std::vector<FeatureKind> kinds;
    std::map<FeatureKind, std::vector<size_t>> k_grid;
    std::vector<ClassifierKind> classifiers;
    bool include_baseline = true;
    uint32_t folds = 10;
    uint64_t rng_seed = 1;
    SeedSets seeds = default_seed_sets();
    LdaParams lda;
    TrainConfig train;
    uint32_t jobs = 1;
};

// Built-in experiment grids per feature kind.
inline std::vector<size_t> default_k_grid(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Hashtag:
            return {5, 10, 25, 50, 100, 250, 500, 1000, 2500, 5000, 7500};
        case FeatureKind::Bow:
            return {5, 50, 100, 250, 500, 1000, 2500, 5000, 10000, 20000, 25000};
        case FeatureKind::Tfidf:
            return {100, 250, 500, 1000, 2500, 5000, 10000, 20000, 50000};
        case FeatureKind::Lda:
            return {10, 20, 50, 100, 200, 500, 1000, 2500, 5000, 10000, 15000};
    }
    return {};
}

// Full cross product via cross_validate, one fold assignment shared across
// cells, per-cell training seeds independent of scheduling.
inline SweepResult sweep(const LabeledCorpus& corpus, const SweepSpec& spec) {
    if (spec.kinds.empty() && !spec.include_baseline)
        throw std::invalid_argument("sweep needs at least one feature kind");

    struct Cell {
        FeatureKind kind;
        size_t k;
        ClassifierKind classifier;
    };
    std::vector<Cell> cells;
    for (const FeatureKind kind : spec.kinds) {
        const auto it = spec.k_grid.find(kind);
        std::vector<size_t> grid = it != spec.k_grid.end() ? it->second : default_k_grid(kind);
        if (grid.empty()) throw std::invalid_argument("empty k grid");
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        for (const size_t k : grid)
            for (const ClassifierKind classifier : spec.classifiers)
                cells.push_back({kind, k, classifier});
    }

    const FoldAssignment folds = stratified_folds(corpus, spec.folds, spec.rng_seed);
    std::vector<SweepRow> rows(cells.size());

    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (error) return;
            }
            try {
                const Cell& cell = cells[i];
                FeatureConfig fcfg;
                fcfg.kind = cell.kind;
                fcfg.k = cell.k;
                fcfg.seeds = spec.seeds;
                fcfg.lda = spec.lda;
                TrainConfig tcfg = spec.train;
                tcfg.classifier = cell.classifier;
                tcfg.rng_seed = derive_seed(
                    spec.rng_seed,
                    splitmix64((static_cast<uint64_t>(cell.kind) << 32) ^ cell.k) ^
                        static_cast<uint64_t>(cell.classifier));
                const ConfusionMatrix m = cross_validate(corpus, fcfg, tcfg, folds);
                rows[i] = {feature_kind_name(cell.kind), cell.k,
                           classifier_name(cell.classifier), accuracy(m), m};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const uint32_t jobs = std::max(1u, spec.jobs);
    if (jobs == 1 || cells.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < std::min<size_t>(jobs, cells.size()); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    SweepResult result;
    result.rows = std::move(rows);
    if (spec.include_baseline) {
        const ConfusionMatrix m = evaluate_baseline(corpus, spec.seeds);
        result.rows.push_back({"baseline", 0, "baseline", accuracy(m), m});
    }

    // Rows come out ordered (kind, k, classifier) with baseline last.
    for (const auto& row : result.rows) {
        const auto key = std::make_pair(row.kind, row.classifier);
        auto it = result.extremes.find(key);
        if (it == result.extremes.end()) {
            result.extremes.emplace(key,
                                    SweepExtremes{row.accuracy, row.k, row.accuracy, row.k});
        } else {
            if (row.accuracy < it->second.min_accuracy) {
                it->second.min_accuracy = row.accuracy;
                it->second.min_k = row.k;
            }
            if (row.accuracy > it->second.max_accuracy) {
                it->second.max_accuracy = row.accuracy;
                it->second.max_k = row.k;
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_accuracy(double acc) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", acc);
    return buf;
}

} // namespace detail

inline void write_sweep_report(const SweepResult& result, std::ostream& out) {
    out << "feature_kind,k,classifier,accuracy\n";
    for (const auto& row : result.rows)
        out << row.kind << ',' << row.k << ',' << row.classifier << ','
            << detail::format_accuracy(row.accuracy) << '\n';
}

inline void write_sweep_summary(const SweepResult& result, std::ostream& out) {
    out << "feature_kind,classifier,min_accuracy,min_k,max_accuracy,max_k\n";
    for (const auto& [key, e] : result.extremes)
        out << key.first << ',' << key.second << ',' << detail::format_accuracy(e.min_accuracy)
            << ',' << e.min_k << ',' << detail::format_accuracy(e.max_accuracy) << ',' << e.max_k
            << '\n';
}

inline std::string sidecar_name(const SweepRow& row) {
    return row.kind + "_" + std::to_string(row.k) + "_" + row.classifier + ".cm";
}

// Rebuilds a SweepResult (rows + extremes) from a report.csv stream.
inline SweepResult read_sweep_report(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line != "feature_kind,k,classifier,accuracy")
        throw MalformedRecord(source + ": missing report header");
    SweepResult result;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto parts = detail::split(line, ',');
        if (parts.size() != 4)
            throw MalformedRecord(source + ":" + std::to_string(line_no) + ": expected 4 fields");
        SweepRow row;
        row.kind = parts[0];
        row.k = std::stoull(parts[1]);
        row.classifier = parts[2];
        row.accuracy = std::stod(parts[3]);
        result.rows.push_back(std::move(row));
    }
    for (const auto& row : result.rows) {
        const auto key = std::make_pair(row.kind, row.classifier);
        auto it = result.extremes.find(key);
        if (it == result.extremes.end()) {
            result.extremes.emplace(key,
                                    SweepExtremes{row.accuracy, row.k, row.accuracy, row.k});
        } else {
            if (row.accuracy < it->second.min_accuracy) {
                it->second.min_accuracy = row.accuracy;
                it->second.min_k = row.k;
            }
            if (row.accuracy > it->second.max_accuracy) {
                it->second.max_accuracy = row.accuracy;
                it->second.max_k = row.k;
            }
        }
    }
    return result;
}

} // namespace stancetk

#endif // STANCETK_EVAL_HPP
