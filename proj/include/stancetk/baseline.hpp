#ifndef STANCETK_BASELINE_HPP
#define STANCETK_BASELINE_HPP

#include "stancetk/corpus.hpp"
#include "stancetk/discovery.hpp"
#include "stancetk/text.hpp"

namespace stancetk {

// Majority vote over seed-hashtag occurrences across the user's tweets;
// every occurrence is one vote, ties (including 0-0) are Ambiguous.
inline ClassLabel baseline_classify(const UserDocument& doc, const SeedSets& seeds) {
    size_t yes_votes = 0;
    size_t no_votes = 0;
    for (const auto& tweet : doc.tweets) {
        for (const auto& tag : extract_hashtags(tweet.text)) {
            if (seeds.is_yes(tag))
                ++yes_votes;
            else if (seeds.is_no(tag))
                ++no_votes;
        }
    }
    if (yes_votes > no_votes) return ClassLabel::Yes;
    if (no_votes > yes_votes) return ClassLabel::No;
    return ClassLabel::Ambiguous;
}

} // namespace stancetk

#endif // STANCETK_BASELINE_HPP
