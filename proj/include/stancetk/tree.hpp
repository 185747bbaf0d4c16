#ifndef STANCETK_TREE_HPP
#define STANCETK_TREE_HPP

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
#include "stancetk/svm.hpp"

namespace stancetk {

struct TreeNode {
    bool is_leaf = true;
    // internal nodes
    uint32_t feature = 0;
    double threshold = 0.0;
    int32_t left = -1;   // index into nodes
    int32_t right = -1;
    // leaves
    ClassLabel label = ClassLabel::Yes;
    std::array<uint32_t, 3> histogram{0, 0, 0};
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes;  // preorder, root at 0
    uint32_t dimension = 0;
    uint32_t min_leaf = 2;
    std::optional<uint32_t> max_depth;
};

struct RandomForestModel {
    std::vector<DecisionTreeModel> trees;
    uint32_t dimension = 0;
    uint32_t features_per_split = 0;
    bool bootstrap = true;
    uint64_t rng_seed = 0;
};

namespace detail {

inline double entropy(const std::array<size_t, 3>& counts, size_t total) {
    double h = 0;
    for (const size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

struct SplitChoice {
    bool found = false;
    uint32_t feature = 0;
    double threshold = 0.0;
    double gain_ratio = 0.0;
    double gain = 0.0;
};

constexpr double kGainEps = 1e-12;

// Best (feature, midpoint) by gain ratio among splits with positive
// information gain and min_leaf rows on both sides. Ties prefer the lower
// feature index, then the lower threshold.
inline SplitChoice best_split(const FeatureMatrix& matrix, const std::vector<uint32_t>& rows,
                              const std::vector<uint32_t>& features, uint32_t min_leaf) {
    SplitChoice best;
    const size_t n = rows.size();
    std::array<size_t, 3> total_counts{0, 0, 0};
    for (const uint32_t r : rows) total_counts[label_index(matrix.rows[r].label)]++;
    const double parent_entropy = entropy(total_counts, n);

    std::vector<std::pair<double, uint8_t>> column(n);
    for (const uint32_t f : features) {
        for (size_t i = 0; i < n; ++i) {
            const auto& row = matrix.rows[rows[i]];
            column[i] = {row.vec.at(f), static_cast<uint8_t>(label_index(row.label))};
        }
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::array<size_t, 3> left{0, 0, 0};
        for (size_t i = 0; i + 1 < n; ++i) {
            left[column[i].second]++;
            if (column[i].first == column[i + 1].first) continue;
            const size_t nl = i + 1;
            const size_t nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const std::array<size_t, 3> right{total_counts[0] - left[0],
                                              total_counts[1] - left[1],
                                              total_counts[2] - left[2]};
            const double pl = static_cast<double>(nl) / static_cast<double>(n);
            const double pr = static_cast<double>(nr) / static_cast<double>(n);
            const double gain =
                parent_entropy - pl * entropy(left, nl) - pr * entropy(right, nr);
            if (gain <= kGainEps) continue;
            const double split_info = -pl * std::log(pl) - pr * std::log(pr);
            const double ratio = gain / split_info;
            const double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2;
            const bool better =
                !best.found || ratio > best.gain_ratio ||
                (ratio == best.gain_ratio &&
                 (f < best.feature || (f == best.feature && threshold < best.threshold)));
            if (better) best = {true, f, threshold, ratio, gain};
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& matrix, const TrainConfig& cfg, uint32_t features_per_split,
                Rng* rng)
        : matrix_(matrix),
          cfg_(cfg),
          min_leaf_(std::max(1u, cfg.min_leaf)),
          features_per_split_(features_per_split),
          rng_(rng) {
        all_features_.resize(matrix.dimension);
        std::iota(all_features_.begin(), all_features_.end(), 0);
    }

    DecisionTreeModel build(std::vector<uint32_t> rows) {
        DecisionTreeModel model;
        model.dimension = matrix_.dimension;
        model.min_leaf = min_leaf_;
        model.max_depth = cfg_.max_depth;
        grow(model, std::move(rows), 0);
        return model;
    }

private:
    int32_t grow(DecisionTreeModel& model, std::vector<uint32_t> rows, uint32_t depth) {
        const auto node_index = static_cast<int32_t>(model.nodes.size());
        model.nodes.emplace_back();

        std::array<uint32_t, 3> hist{0, 0, 0};
        for (const uint32_t r : rows) hist[label_index(matrix_.rows[r].label)]++;
        const auto majority = [&] {
            size_t best = 0;
            for (size_t c = 1; c < 3; ++c)
                if (hist[c] > hist[best]) best = c;
            return static_cast<ClassLabel>(best);
        };
        const bool pure = std::count(hist.begin(), hist.end(), 0u) >= 2;
        const bool too_deep = cfg_.max_depth && depth >= *cfg_.max_depth;

        detail::SplitChoice split;
        if (!pure && !too_deep && rows.size() >= 2 * static_cast<size_t>(min_leaf_))
            split = best_split(matrix_, rows, candidate_features(), min_leaf_);

        if (!split.found) {
            TreeNode& leaf = model.nodes[node_index];
            leaf.is_leaf = true;
            leaf.label = majority();
            leaf.histogram = hist;
            return node_index;
        }

        std::vector<uint32_t> left_rows;
        std::vector<uint32_t> right_rows;
        for (const uint32_t r : rows) {
            if (matrix_.rows[r].vec.at(split.feature) <= split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int32_t left = grow(model, std::move(left_rows), depth + 1);
        const int32_t right = grow(model, std::move(right_rows), depth + 1);
        TreeNode& node = model.nodes[node_index];
        node.is_leaf = false;
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    // Candidate features for one split: all of them, or a fresh random
    // subset when features_per_split is below the dimension.
    const std::vector<uint32_t>& candidate_features() {
        if (features_per_split_ >= matrix_.dimension || rng_ == nullptr) return all_features_;
        subset_.clear();
        std::vector<uint32_t> pool = all_features_;
        for (uint32_t i = 0; i < features_per_split_; ++i) {
            const size_t j = i + rng_->index(pool.size() - i);
            std::swap(pool[i], pool[j]);
            subset_.push_back(pool[i]);
        }
        std::sort(subset_.begin(), subset_.end());
        return subset_;
    }

    const FeatureMatrix& matrix_;
    const TrainConfig& cfg_;
    uint32_t min_leaf_;
    uint32_t features_per_split_;
    Rng* rng_;
    std::vector<uint32_t> all_features_;
    std::vector<uint32_t> subset_;
};

} // namespace detail

inline DecisionTreeModel tree_train(const FeatureMatrix& matrix, const TrainConfig& cfg) {
    if (matrix.rows.empty()) throw std::invalid_argument("empty training matrix");
    std::vector<uint32_t> rows(matrix.rows.size());
    std::iota(rows.begin(), rows.end(), 0);
    detail::TreeBuilder builder(matrix, cfg, matrix.dimension, nullptr);
    return builder.build(std::move(rows));
}

inline ClassLabel tree_predict(const DecisionTreeModel& model, const FeatureVector& v) {
    int32_t at = 0;
    while (!model.nodes[at].is_leaf) {
        const TreeNode& node = model.nodes[at];
        at = v.at(node.feature) <= node.threshold ? node.left : node.right;
    }
    return model.nodes[at].label;
}

// B trees on seeded bootstrap samples with per-split feature subsets;
// per-tree seeds derive deterministically from cfg.rng_seed.
inline RandomForestModel forest_train(const FeatureMatrix& matrix, const TrainConfig& cfg) {
    if (matrix.rows.empty()) throw std::invalid_argument("empty training matrix");
    if (cfg.n_trees < 1) throw std::invalid_argument("forest needs at least one tree");

    RandomForestModel forest;
    forest.dimension = matrix.dimension;
    forest.bootstrap = cfg.bootstrap;
    forest.rng_seed = cfg.rng_seed;
    forest.features_per_split =
        cfg.features_per_split > 0
            ? cfg.features_per_split
            : static_cast<uint32_t>(
                  std::ceil(std::sqrt(static_cast<double>(matrix.dimension))));

    const size_t n = matrix.rows.size();
    for (uint32_t b = 0; b < cfg.n_trees; ++b) {
        Rng rng(derive_seed(cfg.rng_seed, b));
        std::vector<uint32_t> rows;
        rows.reserve(n);
        if (cfg.bootstrap) {
            for (size_t i = 0; i < n; ++i) rows.push_back(static_cast<uint32_t>(rng.index(n)));
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), 0);
        }
        detail::TreeBuilder builder(matrix, cfg, forest.features_per_split, &rng);
        forest.trees.push_back(builder.build(std::move(rows)));
    }
    return forest;
}

inline ClassLabel forest_predict(const RandomForestModel& model, const FeatureVector& v) {
    std::array<size_t, 3> votes{0, 0, 0};
    for (const auto& tree : model.trees) votes[label_index(tree_predict(tree, v))]++;
    size_t best = 0;
    for (size_t c = 1; c < 3; ++c)
        if (votes[c] > votes[best]) best = c;  // ties keep label order
    return static_cast<ClassLabel>(best);
}

// ---------------------------------------------------------------------------
// Model files: trees as preorder node lists
// ---------------------------------------------------------------------------

inline void write_tree_nodes(const DecisionTreeModel& model, std::ostream& out) {
    out << "nodes " << model.nodes.size() << '\n';
    for (const auto& node : model.nodes) {
        if (node.is_leaf) {
            out << "leaf " << label_name(node.label) << ' ' << node.histogram[0] << ' '
                << node.histogram[1] << ' ' << node.histogram[2] << '\n';
        } else {
            out << "internal " << node.feature << ' ' << detail::format_double(node.threshold)
                << '\n';
        }
    }
}

inline void write_tree_model(const DecisionTreeModel& model, std::ostream& out) {
    out << "stancetk-tree v1\n";
    out << "dimension " << model.dimension << '\n';
    out << "min_leaf " << model.min_leaf << '\n';
    out << "max_depth " << (model.max_depth ? static_cast<int64_t>(*model.max_depth) : -1)
        << '\n';
    write_tree_nodes(model, out);
}

inline void write_tree_model(const DecisionTreeModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write tree model " + path);
    write_tree_model(model, out);
}

namespace detail {

// Rebuild child links from the preorder list.
inline int32_t relink_subtree(DecisionTreeModel& model, int32_t at) {
    if (at < 0 || at >= static_cast<int32_t>(model.nodes.size()))
        throw MalformedRecord("truncated tree node list");
    if (model.nodes[at].is_leaf) return at + 1;
    model.nodes[at].left = at + 1;
    const int32_t after_left = relink_subtree(model, at + 1);
    model.nodes[at].right = after_left;
    return relink_subtree(model, after_left);
}

inline DecisionTreeModel read_tree_body(std::istream& in, const std::string& source) {
    const auto fail = [&](const std::string& why) -> MalformedRecord {
        return MalformedRecord(source + ": " + why);
    };
    DecisionTreeModel model;
    std::string key;
    int64_t depth = -1;
    in >> key >> model.dimension;
    if (key != "dimension") throw fail("expected dimension");
    in >> key >> model.min_leaf;
    if (key != "min_leaf") throw fail("expected min_leaf");
    in >> key >> depth;
    if (key != "max_depth") throw fail("expected max_depth");
    if (depth >= 0) model.max_depth = static_cast<uint32_t>(depth);
    size_t count = 0;
    in >> key >> count;
    if (key != "nodes") throw fail("expected nodes");
    model.nodes.resize(count);
    for (auto& node : model.nodes) {
        std::string tag;
        if (!(in >> tag)) throw fail("truncated node list");
        if (tag == "leaf") {
            node.is_leaf = true;
            std::string name;
            in >> name >> node.histogram[0] >> node.histogram[1] >> node.histogram[2];
            const auto label = label_from_name(name);
            if (!label) throw fail("unknown label " + name);
            node.label = *label;
        } else if (tag == "internal") {
            node.is_leaf = false;
            in >> node.feature >> node.threshold;
        } else {
            throw fail("unknown node tag " + tag);
        }
    }
    if (!model.nodes.empty()) {
        const int32_t consumed = relink_subtree(model, 0);
        if (consumed != static_cast<int32_t>(model.nodes.size()))
            throw fail("dangling tree nodes");
    }
    return model;
}

} // namespace detail

inline DecisionTreeModel read_tree_model(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line != "stancetk-tree v1")
        throw MalformedRecord(source + ": bad model header");
    return detail::read_tree_body(in, source);
}

inline DecisionTreeModel read_tree_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tree model " + path);
    return read_tree_model(in, path);
}

inline void write_forest_model(const RandomForestModel& model, std::ostream& out) {
    out << "stancetk-forest v1\n";
    out << "dimension " << model.dimension << '\n';
    out << "trees " << model.trees.size() << '\n';
    out << "features_per_split " << model.features_per_split << '\n';
    out << "bootstrap " << (model.bootstrap ? 1 : 0) << '\n';
    out << "seed " << model.rng_seed << '\n';
    for (const auto& tree : model.trees) {
        out << "tree\n";
        out << "dimension " << tree.dimension << '\n';
        out << "min_leaf " << tree.min_leaf << '\n';
        out << "max_depth " << (tree.max_depth ? static_cast<int64_t>(*tree.max_depth) : -1)
            << '\n';
        write_tree_nodes(tree, out);
    }
}

inline void write_forest_model(const RandomForestModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write forest model " + path);
    write_forest_model(model, out);
}

inline RandomForestModel read_forest_model(std::istream& in, const std::string& source) {
    const auto fail = [&](const std::string& why) -> MalformedRecord {
        return MalformedRecord(source + ": " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "stancetk-forest v1") throw fail("bad model header");
    RandomForestModel model;
    std::string key;
    size_t count = 0;
    int flag = 0;
    in >> key >> model.dimension;
    if (key != "dimension") throw fail("expected dimension");
    in >> key >> count;
    if (key != "trees") throw fail("expected trees");
    in >> key >> model.features_per_split;
    if (key != "features_per_split") throw fail("expected features_per_split");
    in >> key >> flag;
    if (key != "bootstrap") throw fail("expected bootstrap");
    model.bootstrap = flag != 0;
    in >> key >> model.rng_seed;
    if (key != "seed") throw fail("expected seed");
    for (size_t b = 0; b < count; ++b) {
        std::string tag;
        in >> tag;
        if (tag != "tree") throw fail("expected tree block");
        model.trees.push_back(detail::read_tree_body(in, source));
    }
    return model;
}

inline RandomForestModel read_forest_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open forest model " + path);
    return read_forest_model(in, path);
}

} // namespace stancetk

#endif // STANCETK_TREE_HPP
