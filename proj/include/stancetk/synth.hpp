#ifndef STANCETK_SYNTH_HPP
#define STANCETK_SYNTH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stancetk/corpus.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/rng.hpp"

namespace stancetk {

// Synthetic corpus with planted structure: partisan users draw from a class
// vocabulary plus a shared one and emit their side's seed hashtags and a few
// planted side hashtags; ambiguous users write spam-topic text and emit both
// sides' seeds at equal expected rates. injection_rate makes a partisan
// tweet also carry an opposing seed.
struct SynthConfig {
    size_t n_users = 2000;
    std::array<double, 3> class_proportions{0.413, 0.391, 0.196};
    size_t tweets_min = 10;
    size_t tweets_max = 30;
    size_t vocab_per_class = 150;
    size_t shared_vocab = 300;
    size_t hashtags_per_class = 20;
    double injection_rate = 0.0;
    size_t spam_topics = 3;
    uint64_t rng_seed = 42;

    // Emission behavior; the defaults keep the baseline clearly beatable
    // while leaving discovery an unambiguous signal.
    double seed_tag_rate = 0.7;        // partisan tweet carries an own-side seed
    double planted_tag_rate = 0.5;     // partisan tweet carries a planted side hashtag
    double ambiguous_seed_rate = 0.25; // per side, per ambiguous tweet
    double spam_tag_rate = 0.3;        // ambiguous tweet carries a spam-topic hashtag
    double class_word_rate = 0.6;      // partisan word comes from the class vocabulary
    double retweet_rate = 0.3;
};

inline void validate(const SynthConfig& cfg) {
    double sum = 0;
    for (double p : cfg.class_proportions) {
        if (p < 0) throw InvalidConfig("class proportion is negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("class proportions must sum to 1");
    if (cfg.injection_rate < 0 || cfg.injection_rate > 1)
        throw InvalidConfig("injection_rate must be in [0,1]");
    if (cfg.n_users == 0) throw InvalidConfig("n_users must be positive");
    if (cfg.tweets_min == 0 || cfg.tweets_min > cfg.tweets_max)
        throw InvalidConfig("tweets_per_user range is invalid");
    if (cfg.vocab_per_class == 0) throw InvalidConfig("vocab_per_class must be positive");
}

// Largest-remainder rounding of proportions * n.
inline std::array<size_t, 3> class_counts_for(const std::array<double, 3>& proportions,
                                              size_t n) {
    std::array<size_t, 3> counts{};
    std::array<double, 3> frac{};
    size_t assigned = 0;
    for (size_t c = 0; c < 3; ++c) {
        const double quota = proportions[c] * static_cast<double>(n);
        counts[c] = static_cast<size_t>(quota);
        frac[c] = quota - static_cast<double>(counts[c]);
        assigned += counts[c];
    }
    std::array<size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (frac[a] != frac[b]) return frac[a] > frac[b];
        return a < b;  // label order on ties
    });
    for (size_t i = 0; assigned < n; ++i, ++assigned) counts[order[i % 3]]++;
    return counts;
}

namespace detail {

inline std::string padded(size_t i, size_t width) {
    std::string s = std::to_string(i);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

} // namespace detail

inline std::pair<std::vector<Tweet>, std::map<std::string, ClassLabel>>
generate_synthetic_corpus(const SynthConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.rng_seed);

    const std::array<std::string, 3> yes_seeds = {"#EVET", "#Evet", "#evet"};
    const std::array<std::string, 3> no_seeds = {"#HAYIR", "#Hayır", "#hayır"};

    std::array<std::vector<std::string>, 2> class_words;
    for (size_t i = 0; i < cfg.vocab_per_class; ++i) {
        class_words[0].push_back("yesword" + detail::padded(i, 3));
        class_words[1].push_back("noword" + detail::padded(i, 3));
    }
    std::vector<std::string> shared_words;
    for (size_t i = 0; i < cfg.shared_vocab; ++i)
        shared_words.push_back("common" + detail::padded(i, 4));

    std::array<std::vector<std::string>, 2> class_tags;
    for (size_t i = 0; i < cfg.hashtags_per_class; ++i) {
        class_tags[0].push_back("#YesTag" + detail::padded(i, 2));
        class_tags[1].push_back("#NoTag" + detail::padded(i, 2));
    }

    const size_t n_spam = std::max<size_t>(cfg.spam_topics, 1);
    std::vector<std::vector<std::string>> spam_words(n_spam);
    std::vector<std::vector<std::string>> spam_tags(n_spam);
    for (size_t t = 0; t < n_spam; ++t) {
        for (size_t i = 0; i < cfg.vocab_per_class; ++i)
            spam_words[t].push_back("spam" + std::to_string(t) + "word" + detail::padded(i, 3));
        spam_tags[t].push_back("#SpamTag" + std::to_string(t) + "a");
        spam_tags[t].push_back("#SpamTag" + std::to_string(t) + "b");
    }

    const auto counts = class_counts_for(cfg.class_proportions, cfg.n_users);

    const size_t id_width = std::to_string(cfg.n_users).size();
    std::vector<Tweet> tweets;
    std::map<std::string, ClassLabel> labels;

    // Hold the whole collection window (8 weeks around 2017-04-16).
    const int64_t t0 = *parse_timestamp("2017-03-21T00:00:00Z");
    const int64_t t1 = *parse_timestamp("2017-05-14T00:00:00Z");
    const size_t expected_tweets =
        cfg.n_users * (cfg.tweets_min + cfg.tweets_max) / 2 + 1;
    const int64_t step = std::max<int64_t>(1, (t1 - t0) / static_cast<int64_t>(expected_tweets));

    size_t seq = 0;
    const auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
        return pool[rng.index(pool.size())];
    };

    size_t user_index = 0;
    for (size_t c = 0; c < 3; ++c) {
        const auto label = static_cast<ClassLabel>(c);
        for (size_t u = 0; u < counts[c]; ++u, ++user_index) {
            const std::string user = "u" + detail::padded(user_index, id_width);
            labels[user] = label;
            const size_t n_tweets =
                cfg.tweets_min + rng.index(cfg.tweets_max - cfg.tweets_min + 1);
            const size_t spam_topic = user_index % n_spam;

            for (size_t k = 0; k < n_tweets; ++k) {
                std::string text;
                const size_t n_words = 5 + rng.index(8);
                const auto append = [&](const std::string& tok) {
                    if (!text.empty()) text += ' ';
                    text += tok;
                };

                if (label == ClassLabel::Ambiguous) {
                    for (size_t w = 0; w < n_words; ++w) {
                        if (shared_words.empty() || rng.bernoulli(0.7))
                            append(pick(spam_words[spam_topic]));
                        else
                            append(pick(shared_words));
                    }
                    if (rng.bernoulli(cfg.spam_tag_rate)) append(pick(spam_tags[spam_topic]));
                    if (rng.bernoulli(cfg.ambiguous_seed_rate)) append(yes_seeds[rng.index(3)]);
                    if (rng.bernoulli(cfg.ambiguous_seed_rate)) append(no_seeds[rng.index(3)]);
                } else {
                    const size_t side = label == ClassLabel::Yes ? 0 : 1;
                    for (size_t w = 0; w < n_words; ++w) {
                        if (shared_words.empty() || rng.bernoulli(cfg.class_word_rate))
                            append(pick(class_words[side]));
                        else
                            append(pick(shared_words));
                    }
                    if (rng.bernoulli(cfg.seed_tag_rate))
                        append(side == 0 ? yes_seeds[rng.index(3)] : no_seeds[rng.index(3)]);
                    if (!class_tags[side].empty() && rng.bernoulli(cfg.planted_tag_rate))
                        append(pick(class_tags[side]));
                    if (rng.bernoulli(cfg.injection_rate))
                        append(side == 0 ? no_seeds[rng.index(3)] : yes_seeds[rng.index(3)]);
                }

                Tweet t;
                t.id = "t" + detail::padded(seq, 8);
                t.user_id = user;
                t.timestamp = t0 + static_cast<int64_t>(seq) * step;
                t.text = std::move(text);
                if (seq > 0 && rng.bernoulli(cfg.retweet_rate)) {
                    t.is_retweet = true;
                    t.retweet_of = "t" + detail::padded(rng.index(seq), 8);
                }
                ++seq;
                tweets.push_back(std::move(t));
            }
        }
    }
    return {std::move(tweets), std::move(labels)};
}

} // namespace stancetk

#endif // STANCETK_SYNTH_HPP
