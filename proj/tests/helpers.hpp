#ifndef STANCETK_TESTS_HELPERS_HPP
#define STANCETK_TESTS_HELPERS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stancetk/corpus.hpp"
#include "stancetk/discovery.hpp"
#include "stancetk/rng.hpp"

namespace testutil {

inline stancetk::Tweet make_tweet(const std::string& id, const std::string& user,
                                  const std::string& text, int64_t ts = 1492300800,
                                  bool is_retweet = false) {
    stancetk::Tweet t;
    t.id = id;
    t.user_id = user;
    t.timestamp = ts;
    t.text = text;
    t.is_retweet = is_retweet;
    return t;
}

inline stancetk::UserDocument make_doc(const std::string& user,
                                       const std::vector<std::string>& texts,
                                       stancetk::ClassLabel label) {
    stancetk::UserDocument doc;
    doc.user_id = user;
    doc.label = label;
    int64_t ts = 1492300800;
    for (size_t i = 0; i < texts.size(); ++i)
        doc.tweets.push_back(make_tweet(user + "-t" + std::to_string(i), user, texts[i], ts + static_cast<int64_t>(i)));
    return doc;
}

inline stancetk::LabeledCorpus make_corpus(std::vector<stancetk::UserDocument> docs) {
    stancetk::LabeledCorpus corpus;
    for (auto& doc : docs) {
        corpus.class_counts[stancetk::label_index(doc.label)]++;
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

// Corpus of single-tweet documents with the 826/782/392 reference split.
inline stancetk::LabeledCorpus reference_split_corpus(size_t yes = 826, size_t no = 782,
                                                   size_t ambiguous = 392) {
    std::vector<stancetk::UserDocument> docs;
    size_t next = 0;
    const auto add = [&](size_t count, stancetk::ClassLabel label, const std::string& text) {
        for (size_t i = 0; i < count; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "u%05zu", next++);
            docs.push_back(make_doc(buf, {text}, label));
        }
    };
    add(yes, stancetk::ClassLabel::Yes, "#EVET vatan");
    add(no, stancetk::ClassLabel::No, "#HAYIR sandık");
    add(ambiguous, stancetk::ClassLabel::Ambiguous, "takip kazan");
    return docs.empty() ? stancetk::LabeledCorpus{} : make_corpus(std::move(docs));
}

// Disjoint vocabularies, one topic per document.
inline stancetk::LabeledCorpus planted_topic_corpus(size_t topics, size_t words_per_topic,
                                                    size_t docs_per_topic, size_t tokens_per_doc,
                                                    uint64_t seed) {
    stancetk::Rng rng(seed);
    std::vector<std::vector<std::string>> vocab(topics);
    for (size_t t = 0; t < topics; ++t)
        for (size_t w = 0; w < words_per_topic; ++w)
            vocab[t].push_back("top" + std::to_string(t) + "word" + std::to_string(w));

    std::vector<stancetk::UserDocument> docs;
    size_t user = 0;
    for (size_t t = 0; t < topics; ++t) {
        for (size_t d = 0; d < docs_per_topic; ++d, ++user) {
            std::string text;
            for (size_t i = 0; i < tokens_per_doc; ++i) {
                if (!text.empty()) text += ' ';
                text += vocab[t][rng.index(words_per_topic)];
            }
            docs.push_back(make_doc("u" + std::to_string(user), {text},
                                    static_cast<stancetk::ClassLabel>(t % 3)));
        }
    }
    return make_corpus(std::move(docs));
}

// ---------------------------------------------------------------------------
// Random micro-corpora and a brute-force discovery oracle
// ---------------------------------------------------------------------------

struct OracleScores {
    std::map<std::string, double> yes;
    std::map<std::string, double> no;
};

inline stancetk::LabeledCorpus random_micro_corpus(stancetk::Rng& rng) {
    static const std::vector<std::string> hashtags = {
        "#EVET", "#Evet", "#evet", "#HAYIR", "#Hayır", "#hayır",
        "#aa",   "#bb",   "#cc",   "#dd",    "#şş"};
    static const std::vector<std::string> words = {"oy", "ver", "vatan", "millet", "sandık"};

    const size_t n_tweets = 3 + rng.index(18);  // <= 20
    std::vector<stancetk::UserDocument> docs;
    const size_t n_users = 1 + rng.index(3);
    for (size_t u = 0; u < n_users; ++u)
        docs.push_back(make_doc("u" + std::to_string(u), {},
                                static_cast<stancetk::ClassLabel>(rng.index(3))));
    for (size_t i = 0; i < n_tweets; ++i) {
        std::string text;
        const auto append = [&](const std::string& tok) {
            if (!text.empty()) text += ' ';
            text += tok;
        };
        // Guarantee at least one seed occurrence in the corpus.
        if (i == 0) append(hashtags[rng.index(6)]);
        const size_t n_tags = rng.index(4);
        for (size_t j = 0; j < n_tags; ++j) append(hashtags[rng.index(hashtags.size())]);
        const size_t n_words = rng.index(4);
        for (size_t j = 0; j < n_words; ++j) append(words[rng.index(words.size())]);
        auto& doc = docs[rng.index(docs.size())];
        doc.tweets.push_back(
            make_tweet("t" + std::to_string(i), doc.user_id, text, 1492300800 + static_cast<int64_t>(i)));
    }
    std::erase_if(docs, [](const auto& d) { return d.tweets.empty(); });
    return make_corpus(std::move(docs));
}

// Direct set enumeration, independent of CooccurrenceIndex: nested loops
// over tweets, no shared code with score_candidates.
inline OracleScores brute_force_scores(const stancetk::LabeledCorpus& corpus,
                                       const stancetk::SeedSets& seeds,
                                       stancetk::TokenKind kind) {
    struct TweetTokens {
        std::string id;
        std::vector<std::string> tokens;
        bool has_seed = false;
    };
    std::vector<TweetTokens> all;
    std::vector<std::string> yes_tweets;
    std::vector<std::string> no_tweets;
    for (const auto& doc : corpus.documents) {
        for (const auto& tweet : doc.tweets) {
            TweetTokens tt;
            tt.id = tweet.id;
            const auto tags = stancetk::extract_hashtags(tweet.text);
            bool yes = false;
            bool no = false;
            for (const auto& tag : tags) {
                if (seeds.yes.count(tag)) yes = true;
                if (seeds.no.count(tag)) no = true;
            }
            if (yes) yes_tweets.push_back(tweet.id);
            if (no) no_tweets.push_back(tweet.id);
            tt.has_seed = yes || no;
            tt.tokens = kind == stancetk::TokenKind::Hashtag
                            ? tags
                            : stancetk::tokenize(stancetk::strip_entities(tweet.text, false));
            all.push_back(std::move(tt));
        }
    }

    std::set<std::string> candidates;
    for (const auto& tt : all)
        if (tt.has_seed)
            for (const auto& tok : tt.tokens) candidates.insert(tok);

    const auto enumerate_jaccard = [&](const std::vector<std::string>& side,
                                       const std::string& token) {
        std::set<std::string> uni(side.begin(), side.end());
        size_t inter = 0;
        std::set<std::string> h;
        for (const auto& tt : all) {
            bool contains = false;
            for (const auto& tok : tt.tokens)
                if (tok == token) contains = true;
            if (!contains) continue;
            if (h.insert(tt.id).second) {
                if (std::find(side.begin(), side.end(), tt.id) != side.end()) ++inter;
                uni.insert(tt.id);
            }
        }
        return static_cast<double>(inter) / static_cast<double>(uni.size());
    };

    OracleScores scores;
    for (const auto& token : candidates) {
        scores.yes[token] = enumerate_jaccard(yes_tweets, token);
        scores.no[token] = enumerate_jaccard(no_tweets, token);
    }
    return scores;
}

} // namespace testutil

#endif // STANCETK_TESTS_HELPERS_HPP
