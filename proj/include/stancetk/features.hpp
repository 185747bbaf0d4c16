#ifndef STANCETK_FEATURES_HPP
#define STANCETK_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stancetk/corpus.hpp"
#include "stancetk/discovery.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/text.hpp"

namespace stancetk {

// ---------------------------------------------------------------------------
// Sparse vectors and matrices
// ---------------------------------------------------------------------------

struct FeatureVector {
    std::map<uint32_t, double> entries;  // index -> weight, no explicit zeros
    uint32_t dimension = 0;

    void add(uint32_t index, double weight) {
        if (weight == 0.0) return;
        auto [it, inserted] = entries.emplace(index, weight);
        if (!inserted) {
            it->second += weight;
            if (it->second == 0.0) entries.erase(it);
        }
    }

    double at(uint32_t index) const {
        const auto it = entries.find(index);
        return it == entries.end() ? 0.0 : it->second;
    }

    double l2_norm() const {
        double sum = 0;
        for (const auto& [i, w] : entries) sum += w * w;
        return std::sqrt(sum);
    }

    void scale(double factor) {
        for (auto& [i, w] : entries) w *= factor;
    }
};

struct MatrixRow {
    std::string user_id;
    FeatureVector vec;
    ClassLabel label = ClassLabel::Ambiguous;
};

struct FeatureMatrix {
    std::vector<MatrixRow> rows;
    uint32_t dimension = 0;
};

// ---------------------------------------------------------------------------
// Document tokens per feature kind
// ---------------------------------------------------------------------------

// Hashtag spaces count raw hashtags (case-sensitive); bow/tfidf spaces count
// words with hashtags stripped; lda spaces keep hashtag words in the stream.
inline std::vector<std::string> document_tokens(const UserDocument& doc, FeatureKind kind) {
    std::vector<std::string> tokens;
    for (const auto& tweet : doc.tweets) {
        if (kind == FeatureKind::Hashtag) {
            auto tags = extract_hashtags(tweet.text);
            tokens.insert(tokens.end(), std::make_move_iterator(tags.begin()),
                          std::make_move_iterator(tags.end()));
        } else {
            const bool keep_hashtags = kind == FeatureKind::Lda;
            auto words = tokenize(strip_entities(tweet.text, keep_hashtags));
            tokens.insert(tokens.end(), std::make_move_iterator(words.begin()),
                          std::make_move_iterator(words.end()));
        }
    }
    return tokens;
}

namespace detail {

inline FeatureVector count_tokens(const UserDocument& doc, const FeatureSpace& space) {
    FeatureVector v;
    v.dimension = static_cast<uint32_t>(space.size());
    for (const auto& token : document_tokens(doc, space.kind)) {
        const auto it = space.index.find(token);
        if (it != space.index.end()) v.add(static_cast<uint32_t>(it->second), 1.0);
    }
    return v;
}

} // namespace detail

inline FeatureVector count_vectorize(const UserDocument& doc, const FeatureSpace& space) {
    if (space.kind == FeatureKind::Tfidf)
        throw std::invalid_argument("count_vectorize expects a hashtag, bow or lda space");
    return detail::count_tokens(doc, space);
}

// ---------------------------------------------------------------------------
// tf-idf
// ---------------------------------------------------------------------------

// Top-k corpus terms by total occurrence count, ties by codepoint order.
inline FeatureSpace select_top_frequent_terms(const LabeledCorpus& corpus, size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::map<std::string, size_t> counts;
    for (const auto& doc : corpus.documents)
        for (const auto& token : document_tokens(doc, FeatureKind::Tfidf)) counts[token]++;

    std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    FeatureSpace space;
    space.kind = FeatureKind::Tfidf;
    const size_t take = std::min(k, ranked.size());
    for (size_t i = 0; i < take; ++i)
        space.push(ranked[i].first, {FeatureProvenance::Origin::Term, -1,
                                     static_cast<double>(ranked[i].second)});
    return space;
}

struct IdfTable {
    size_t n_docs = 0;
    std::unordered_map<std::string, size_t> df;   // documents containing the token
    std::unordered_map<std::string, double> idf;  // ln(n_docs / df)
};

inline IdfTable compute_idf(const LabeledCorpus& corpus, const FeatureSpace& space) {
    IdfTable table;
    table.n_docs = corpus.documents.size();
    for (const auto& doc : corpus.documents) {
        std::unordered_set<std::string> seen;
        for (const auto& token : document_tokens(doc, space.kind)) {
            if (space.index.count(token)) seen.insert(token);
        }
        for (const auto& token : seen) table.df[token]++;
    }
    for (const auto& token : space.tokens) {
        const auto it = table.df.find(token);
        if (it == table.df.end())
            throw TokenAbsentFromCorpus("token \"" + token + "\" occurs in no document");
        table.idf[token] =
            std::log(static_cast<double>(table.n_docs) / static_cast<double>(it->second));
    }
    return table;
}

// count * idf, then L2 normalization; an all-zero raw vector stays zero.
inline FeatureVector tfidf_vectorize(const UserDocument& doc, const FeatureSpace& space,
                                     const IdfTable& idf) {
    if (space.kind != FeatureKind::Tfidf)
        throw std::invalid_argument("tfidf_vectorize expects a tfidf space");
    FeatureVector counts = detail::count_tokens(doc, space);
    FeatureVector v;
    v.dimension = counts.dimension;
    for (const auto& [index, count] : counts.entries) {
        const auto it = idf.idf.find(space.tokens[index]);
        const double weight = it == idf.idf.end() ? 0.0 : count * it->second;
        v.add(index, weight);
    }
    const double norm = v.l2_norm();
    if (norm > 0) v.scale(1.0 / norm);
    return v;
}

// ---------------------------------------------------------------------------
// Corpus vectorization
// ---------------------------------------------------------------------------

inline FeatureMatrix vectorize_corpus(const LabeledCorpus& corpus, const FeatureSpace& space,
                                      const IdfTable* idf = nullptr) {
    FeatureMatrix matrix;
    matrix.dimension = static_cast<uint32_t>(space.size());
    matrix.rows.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        FeatureVector v = space.kind == FeatureKind::Tfidf
                              ? tfidf_vectorize(doc, space, *idf)
                              : count_vectorize(doc, space);
        matrix.rows.push_back({doc.user_id, std::move(v), doc.label});
    }
    return matrix;
}

// ---------------------------------------------------------------------------
// Matrix file: user_id<TAB>label<TAB>index:weight ...
// ---------------------------------------------------------------------------

inline void write_matrix(const FeatureMatrix& matrix, FeatureKind kind, std::ostream& out) {
    out << "# stancetk matrix\tkind=" << feature_kind_name(kind)
        << "\tdimension=" << matrix.dimension << '\n';
    for (const auto& row : matrix.rows) {
        out << row.user_id << '\t' << label_name(row.label);
        for (const auto& [index, weight] : row.vec.entries)
            out << '\t' << index << ':' << detail::format_double(weight);
        out << '\n';
    }
}

inline void write_matrix(const FeatureMatrix& matrix, FeatureKind kind, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix " + path);
    write_matrix(matrix, kind, out);
}

struct MatrixFile {
    FeatureMatrix matrix;
    FeatureKind kind = FeatureKind::Hashtag;
};

inline MatrixFile read_matrix(std::istream& in, const std::string& source) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# stancetk matrix", 0) != 0)
        throw MalformedRecord(source + ": missing matrix header");
    MatrixFile file;
    for (const auto& field : detail::split(header, '\t')) {
        const size_t eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "kind") {
            const auto kind = feature_kind_from_name(value);
            if (!kind) throw MalformedRecord(source + ": unknown kind \"" + value + "\"");
            file.kind = *kind;
        } else if (key == "dimension") {
            file.matrix.dimension = static_cast<uint32_t>(std::stoul(value));
        }
    }
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(line_no);
        const auto parts = detail::split(line, '\t');
        if (parts.size() < 2) throw MalformedRecord(where + ": expected user_id and label");
        MatrixRow row;
        row.user_id = parts[0];
        const auto label = label_from_name(parts[1]);
        if (!label) throw MalformedRecord(where + ": unknown label \"" + parts[1] + "\"");
        row.label = *label;
        row.vec.dimension = file.matrix.dimension;
        for (size_t i = 2; i < parts.size(); ++i) {
            const size_t colon = parts[i].find(':');
            if (colon == std::string::npos)
                throw MalformedRecord(where + ": expected index:weight");
            const auto index = static_cast<uint32_t>(std::stoul(parts[i].substr(0, colon)));
            if (index >= file.matrix.dimension)
                throw MalformedRecord(where + ": index out of range");
            row.vec.entries[index] = std::stod(parts[i].substr(colon + 1));
        }
        file.matrix.rows.push_back(std::move(row));
    }
    return file;
}

inline MatrixFile read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix " + path);
    return read_matrix(in, path);
}

} // namespace stancetk

#endif // STANCETK_FEATURES_HPP
