#ifndef STANCETK_LDA_HPP
#define STANCETK_LDA_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "stancetk/corpus.hpp"
#include "stancetk/discovery.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/features.hpp"
#include "stancetk/rng.hpp"

namespace stancetk {

struct LdaModel {
    uint32_t n_topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    uint64_t rng_seed = 0;

    std::vector<std::string> dictionary;           // term id -> token
    std::vector<std::vector<double>> topic_word;   // T x V, rows sum to 1
    std::vector<std::vector<double>> doc_topic;    // D x T, rows sum to 1
    std::vector<std::string> doc_ids;              // sampled training documents

    // Sampler state, kept for inspection; not serialized.
    std::vector<std::vector<uint32_t>> doc_terms;    // term ids per document
    std::vector<std::vector<uint32_t>> assignments;  // topic ids per token
    std::vector<std::vector<int64_t>> n_topic_word;  // T x V
    std::vector<std::vector<int64_t>> n_doc_topic;   // D x T
    std::vector<int64_t> n_topic;                    // T
    std::vector<int64_t> n_doc;                      // D
};

// Full recount of the sampler counters; true when every counter matches the
// current assignments.
inline bool lda_counters_consistent(const LdaModel& m) {
    const size_t T = m.n_topics;
    const size_t V = m.dictionary.size();
    const size_t D = m.doc_terms.size();
    std::vector<std::vector<int64_t>> tw(T, std::vector<int64_t>(V, 0));
    std::vector<std::vector<int64_t>> dt(D, std::vector<int64_t>(T, 0));
    std::vector<int64_t> nt(T, 0);
    std::vector<int64_t> nd(D, 0);
    for (size_t d = 0; d < D; ++d) {
        if (m.assignments[d].size() != m.doc_terms[d].size()) return false;
        for (size_t i = 0; i < m.doc_terms[d].size(); ++i) {
            const uint32_t w = m.doc_terms[d][i];
            const uint32_t z = m.assignments[d][i];
            if (w >= V || z >= T) return false;
            tw[z][w]++;
            dt[d][z]++;
            nt[z]++;
            nd[d]++;
        }
    }
    return tw == m.n_topic_word && dt == m.n_doc_topic && nt == m.n_topic && nd == m.n_doc;
}

// Collapsed Gibbs sampling over token-topic assignments. Documents are
// tokenized with hashtags kept; the dictionary holds the dict_size most
// frequent terms of the sampled documents. alpha <= 0 selects 50/T.
inline LdaModel lda_train(const LabeledCorpus& corpus, uint32_t n_topics, uint32_t iterations,
                          size_t dict_size, size_t sample_size, double alpha, double beta,
                          uint64_t rng_seed,
                          const std::function<void(const LdaModel&)>& sweep_hook = nullptr) {
    if (n_topics < 2) throw std::invalid_argument("n_topics must be >= 2");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (beta <= 0) throw std::invalid_argument("beta must be positive");
    if (alpha <= 0) alpha = 50.0 / n_topics;

    Rng rng(rng_seed);

    // Seeded sample of documents, kept in corpus order.
    std::vector<size_t> doc_index(corpus.documents.size());
    std::iota(doc_index.begin(), doc_index.end(), 0);
    if (sample_size < doc_index.size()) {
        rng.shuffle(doc_index);
        doc_index.resize(sample_size);
        std::sort(doc_index.begin(), doc_index.end());
    }

    std::vector<std::vector<std::string>> doc_tokens;
    doc_tokens.reserve(doc_index.size());
    std::map<std::string, size_t> term_counts;
    for (const size_t d : doc_index) {
        doc_tokens.push_back(document_tokens(corpus.documents[d], FeatureKind::Lda));
        for (const auto& token : doc_tokens.back()) term_counts[token]++;
    }

    std::vector<std::pair<std::string, size_t>> ranked(term_counts.begin(), term_counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.empty()) throw EmptyDictionary("corpus produced no terms");
    ranked.resize(std::min(dict_size, ranked.size()));

    LdaModel model;
    model.n_topics = n_topics;
    model.alpha = alpha;
    model.beta = beta;
    model.rng_seed = rng_seed;
    std::unordered_map<std::string, uint32_t> term_id;
    for (const auto& [token, count] : ranked) {
        (void)count;
        term_id.emplace(token, static_cast<uint32_t>(model.dictionary.size()));
        model.dictionary.push_back(token);
    }

    const size_t T = n_topics;
    const size_t V = model.dictionary.size();
    const size_t D = doc_index.size();
    model.doc_terms.resize(D);
    model.assignments.resize(D);
    model.n_topic_word.assign(T, std::vector<int64_t>(V, 0));
    model.n_doc_topic.assign(D, std::vector<int64_t>(T, 0));
    model.n_topic.assign(T, 0);
    model.n_doc.assign(D, 0);
    for (size_t d = 0; d < D; ++d) {
        model.doc_ids.push_back(corpus.documents[doc_index[d]].user_id);
        for (const auto& token : doc_tokens[d]) {
            const auto it = term_id.find(token);
            if (it == term_id.end()) continue;  // outside the dictionary cap
            model.doc_terms[d].push_back(it->second);
        }
    }
    doc_tokens.clear();

    // Random initial assignments.
    for (size_t d = 0; d < D; ++d) {
        model.assignments[d].resize(model.doc_terms[d].size());
        for (size_t i = 0; i < model.doc_terms[d].size(); ++i) {
            const auto z = static_cast<uint32_t>(rng.index(T));
            const uint32_t w = model.doc_terms[d][i];
            model.assignments[d][i] = z;
            model.n_topic_word[z][w]++;
            model.n_doc_topic[d][z]++;
            model.n_topic[z]++;
            model.n_doc[d]++;
        }
    }

    const double beta_v = beta * static_cast<double>(V);
    std::vector<double> cumulative(T);
    for (uint32_t sweep = 0; sweep < iterations; ++sweep) {
        for (size_t d = 0; d < D; ++d) {
            auto& zs = model.assignments[d];
            const auto& ws = model.doc_terms[d];
            auto& dt = model.n_doc_topic[d];
            for (size_t i = 0; i < ws.size(); ++i) {
                const uint32_t w = ws[i];
                const uint32_t old_z = zs[i];
                model.n_topic_word[old_z][w]--;
                dt[old_z]--;
                model.n_topic[old_z]--;

                double total = 0;
                for (size_t t = 0; t < T; ++t) {
                    const double p =
                        (static_cast<double>(dt[t]) + alpha) *
                        (static_cast<double>(model.n_topic_word[t][w]) + beta) /
                        (static_cast<double>(model.n_topic[t]) + beta_v);
                    total += p;
                    cumulative[t] = total;
                }
                const double u = rng.next_double() * total;
                uint32_t new_z = 0;
                while (new_z + 1 < T && cumulative[new_z] <= u) ++new_z;

                zs[i] = new_z;
                model.n_topic_word[new_z][w]++;
                dt[new_z]++;
                model.n_topic[new_z]++;
            }
        }
        if (sweep_hook) sweep_hook(model);
    }

    model.topic_word.assign(T, std::vector<double>(V, 0));
    for (size_t t = 0; t < T; ++t) {
        const double denom = static_cast<double>(model.n_topic[t]) + beta_v;
        for (size_t w = 0; w < V; ++w)
            model.topic_word[t][w] =
                (static_cast<double>(model.n_topic_word[t][w]) + beta) / denom;
    }
    model.doc_topic.assign(D, std::vector<double>(T, 0));
    const double alpha_t = alpha * static_cast<double>(T);
    for (size_t d = 0; d < D; ++d) {
        const double denom = static_cast<double>(model.n_doc[d]) + alpha_t;
        for (size_t t = 0; t < T; ++t)
            model.doc_topic[d][t] =
                (static_cast<double>(model.n_doc_topic[d][t]) + alpha) / denom;
    }
    return model;
}

// Top-k terms of each topic, deduplicated; provenance keeps the first
// contributing topic. Size is at most T*k.
inline FeatureSpace lda_feature_space(const LdaModel& model, size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    FeatureSpace space;
    space.kind = FeatureKind::Lda;
    const size_t V = model.dictionary.size();
    std::vector<uint32_t> order(V);
    for (size_t t = 0; t < model.n_topics; ++t) {
        std::iota(order.begin(), order.end(), 0);
        const auto& row = model.topic_word[t];
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            if (row[a] != row[b]) return row[a] > row[b];
            return model.dictionary[a] < model.dictionary[b];
        });
        const size_t take = std::min(k, order.size());
        for (size_t i = 0; i < take; ++i) {
            const auto& token = model.dictionary[order[i]];
            if (space.index.count(token)) continue;
            space.push(token, {FeatureProvenance::Origin::Topic, static_cast<int>(t),
                               row[order[i]]});
        }
    }
    return space;
}

// ---------------------------------------------------------------------------
// Model file: hyperparameters, dictionary, topic_word rows
// ---------------------------------------------------------------------------

inline void write_lda_model(const LdaModel& model, std::ostream& out) {
    out << "stancetk-lda v1\n";
    out << "topics " << model.n_topics << '\n';
    out << "alpha " << detail::format_double(model.alpha) << '\n';
    out << "beta " << detail::format_double(model.beta) << '\n';
    out << "seed " << model.rng_seed << '\n';
    out << "dictionary " << model.dictionary.size() << '\n';
    for (const auto& token : model.dictionary) out << token << '\n';
    out << "topic_word\n";
    for (const auto& row : model.topic_word) {
        for (size_t w = 0; w < row.size(); ++w) {
            if (w) out << ' ';
            out << detail::format_double(row[w]);
        }
        out << '\n';
    }
}

inline void write_lda_model(const LdaModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write LDA model " + path);
    write_lda_model(model, out);
}

inline LdaModel read_lda_model(std::istream& in, const std::string& source) {
    const auto fail = [&](const std::string& why) -> MalformedRecord {
        return MalformedRecord(source + ": " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "stancetk-lda v1") throw fail("bad model header");
    LdaModel model;
    std::string key;
    size_t v = 0;
    in >> key >> model.n_topics;
    if (key != "topics") throw fail("expected topics");
    in >> key >> model.alpha;
    if (key != "alpha") throw fail("expected alpha");
    in >> key >> model.beta;
    if (key != "beta") throw fail("expected beta");
    in >> key >> model.rng_seed;
    if (key != "seed") throw fail("expected seed");
    in >> key >> v;
    if (key != "dictionary") throw fail("expected dictionary");
    model.dictionary.resize(v);
    for (auto& token : model.dictionary)
        if (!(in >> token)) throw fail("truncated dictionary");
    in >> key;
    if (key != "topic_word") throw fail("expected topic_word");
    model.topic_word.assign(model.n_topics, std::vector<double>(v, 0));
    for (auto& row : model.topic_word)
        for (auto& p : row)
            if (!(in >> p)) throw fail("truncated topic_word");
    return model;
}

inline LdaModel read_lda_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open LDA model " + path);
    return read_lda_model(in, path);
}

} // namespace stancetk

#endif // STANCETK_LDA_HPP
