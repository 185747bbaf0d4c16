#ifndef STANCETK_DISCOVERY_HPP
#define STANCETK_DISCOVERY_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stancetk/corpus.hpp"
#include "stancetk/errors.hpp"
#include "stancetk/text.hpp"

namespace stancetk {

// ---------------------------------------------------------------------------
// Seed sets
// ---------------------------------------------------------------------------

struct SeedSets {
    std::set<std::string> yes;
    std::set<std::string> no;

    bool is_yes(const std::string& tag) const { return yes.count(tag) > 0; }
    bool is_no(const std::string& tag) const { return no.count(tag) > 0; }
};

inline SeedSets default_seed_sets() {
    return SeedSets{{"#EVET", "#Evet", "#evet"}, {"#HAYIR", "#Hayır", "#hayır"}};
}

inline void validate(const SeedSets& seeds) {
    if (seeds.yes.empty() || seeds.no.empty())
        throw InvalidConfig("both seed sets must be nonempty");
    for (const auto* set : {&seeds.yes, &seeds.no})
        for (const auto& tag : *set)
            if (tag.size() < 2 || tag[0] != '#')
                throw InvalidConfig("seed \"" + tag + "\" is not a hashtag");
    for (const auto& tag : seeds.yes)
        if (seeds.no.count(tag))
            throw InvalidConfig("seed sets are not disjoint: " + tag);
}

// ---------------------------------------------------------------------------
// Co-occurrence index
// ---------------------------------------------------------------------------

enum class TokenKind { Hashtag, Word };

// token_tweets holds the full tweet set H per token; only tokens that
// appear in at least one seed-carrying tweet are kept.
struct CooccurrenceIndex {
    TokenKind kind = TokenKind::Hashtag;
    std::map<std::string, std::set<std::string>> token_tweets;
    std::set<std::string> seed_tweets_yes;
    std::set<std::string> seed_tweets_no;
};

inline CooccurrenceIndex index_token_tweets(const LabeledCorpus& corpus,
                                            const SeedSets& seeds, TokenKind kind) {
    CooccurrenceIndex index;
    index.kind = kind;
    std::unordered_set<std::string> candidates;

    for (const auto& doc : corpus.documents) {
        for (const auto& tweet : doc.tweets) {
            const auto tags = extract_hashtags(tweet.text);
            bool has_seed = false;
            for (const auto& tag : tags) {
                if (seeds.is_yes(tag)) {
                    index.seed_tweets_yes.insert(tweet.id);
                    has_seed = true;
                } else if (seeds.is_no(tag)) {
                    index.seed_tweets_no.insert(tweet.id);
                    has_seed = true;
                }
            }
            const std::vector<std::string> tokens =
                kind == TokenKind::Hashtag
                    ? tags
                    : tokenize(strip_entities(tweet.text, /*keep_hashtags=*/false));
            for (const auto& token : tokens) {
                index.token_tweets[token].insert(tweet.id);
                if (has_seed) candidates.insert(token);
            }
        }
    }

    if (index.seed_tweets_yes.empty() && index.seed_tweets_no.empty())
        throw NoSeedOccurrences("no tweet contains a seed hashtag");

    std::erase_if(index.token_tweets,
                  [&](const auto& entry) { return !candidates.count(entry.first); });
    return index;
}

// ---------------------------------------------------------------------------
// Jaccard scoring
// ---------------------------------------------------------------------------

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) throw BothEmpty("jaccard of two empty sets");
    size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++inter;
            ++ia;
            ++ib;
        }
    }
    const size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

enum class Side { Yes, No };

inline const char* side_name(Side s) { return s == Side::Yes ? "yes" : "no"; }

struct RankedEntry {
    std::string token;
    double score = 0.0;
};

// Entries sorted by score descending, ties by token codepoint order.
struct RankedFeatureList {
    Side side = Side::Yes;
    std::vector<RankedEntry> entries;
};

namespace detail {

inline void sort_ranked(std::vector<RankedEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.token < b.token;
    });
}

} // namespace detail

// Scores every indexed token against both sides' seed-tweet sets and returns
// the two full pre-assignment ranked lists.
inline std::pair<RankedFeatureList, RankedFeatureList> score_candidates(
    const CooccurrenceIndex& index) {
    RankedFeatureList yes_list{Side::Yes, {}};
    RankedFeatureList no_list{Side::No, {}};
    yes_list.entries.reserve(index.token_tweets.size());
    no_list.entries.reserve(index.token_tweets.size());
    for (const auto& [token, tweets] : index.token_tweets) {
        yes_list.entries.push_back({token, jaccard(index.seed_tweets_yes, tweets)});
        no_list.entries.push_back({token, jaccard(index.seed_tweets_no, tweets)});
    }
    detail::sort_ranked(yes_list.entries);
    detail::sort_ranked(no_list.entries);
    return {std::move(yes_list), std::move(no_list)};
}

// Each token goes to the side of its larger score; exact ties drop it, and a
// side's own seeds never enter that side's list (a seed can still cross over).
inline std::pair<RankedFeatureList, RankedFeatureList> assign_disjoint(
    const RankedFeatureList& yes_list, const RankedFeatureList& no_list,
    const SeedSets& seeds) {
    std::unordered_map<std::string, double> no_score;
    no_score.reserve(no_list.entries.size());
    for (const auto& e : no_list.entries) no_score[e.token] = e.score;

    RankedFeatureList yes_out{Side::Yes, {}};
    RankedFeatureList no_out{Side::No, {}};
    for (const auto& e : yes_list.entries) {
        const double other = no_score.at(e.token);
        if (e.score > other) {
            if (!seeds.is_yes(e.token)) yes_out.entries.push_back(e);
        } else if (other > e.score) {
            if (!seeds.is_no(e.token)) no_out.entries.push_back({e.token, other});
        }
        // equal scores: dropped
    }
    detail::sort_ranked(yes_out.entries);
    detail::sort_ranked(no_out.entries);
    return {std::move(yes_out), std::move(no_out)};
}

// ---------------------------------------------------------------------------
// Feature spaces
// ---------------------------------------------------------------------------

enum class FeatureKind { Hashtag, Bow, Tfidf, Lda };

inline const char* feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::Hashtag: return "hashtag";
        case FeatureKind::Bow: return "bow";
        case FeatureKind::Tfidf: return "tfidf";
        case FeatureKind::Lda: return "lda";
    }
    return "?";
}

inline std::optional<FeatureKind> feature_kind_from_name(std::string_view s) {
    if (s == "hashtag") return FeatureKind::Hashtag;
    if (s == "bow") return FeatureKind::Bow;
    if (s == "tfidf") return FeatureKind::Tfidf;
    if (s == "lda") return FeatureKind::Lda;
    return std::nullopt;
}

struct FeatureProvenance {
    enum class Origin { Yes, No, Topic, Term };
    Origin origin = Origin::Term;
    int topic = -1;  // set when origin == Topic
    double score = 0.0;
};

inline std::string origin_name(const FeatureProvenance& p) {
    switch (p.origin) {
        case FeatureProvenance::Origin::Yes: return "yes";
        case FeatureProvenance::Origin::No: return "no";
        case FeatureProvenance::Origin::Topic: return "t" + std::to_string(p.topic);
        case FeatureProvenance::Origin::Term: return "term";
    }
    return "?";
}

// Ordered unique token set; every vectorizer consumes one of these.
struct FeatureSpace {
    FeatureKind kind = FeatureKind::Hashtag;
    std::vector<std::string> tokens;
    std::vector<FeatureProvenance> provenance;
    std::unordered_map<std::string, size_t> index;

    size_t size() const { return tokens.size(); }

    void push(std::string token, FeatureProvenance p) {
        index.emplace(token, tokens.size());
        tokens.push_back(std::move(token));
        provenance.push_back(p);
    }
};

// Top-min(k, list size) from each assigned list, Yes side first.
inline FeatureSpace build_feature_space(const RankedFeatureList& yes_list,
                                        const RankedFeatureList& no_list, size_t k,
                                        FeatureKind kind) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    FeatureSpace space;
    space.kind = kind;
    const auto add = [&](const RankedFeatureList& list, FeatureProvenance::Origin origin) {
        const size_t take = std::min(k, list.entries.size());
        for (size_t i = 0; i < take; ++i)
            space.push(list.entries[i].token, {origin, -1, list.entries[i].score});
    };
    add(yes_list, FeatureProvenance::Origin::Yes);
    add(no_list, FeatureProvenance::Origin::No);
    return space;
}

// ---------------------------------------------------------------------------
// Feature-space file: header plus rank<TAB>token<TAB>side<TAB>score rows
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string join_comma(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ',';
        out += s;
    }
    return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        const size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

} // namespace detail

inline void write_feature_space(const FeatureSpace& space, const SeedSets& seeds, size_t k,
                                std::ostream& out) {
    out << "# stancetk feature-space\tkind=" << feature_kind_name(space.kind) << "\tk=" << k
        << "\tseeds_yes=" << detail::join_comma(seeds.yes)
        << "\tseeds_no=" << detail::join_comma(seeds.no) << '\n';
    for (size_t i = 0; i < space.size(); ++i) {
        out << (i + 1) << '\t' << space.tokens[i] << '\t' << origin_name(space.provenance[i])
            << '\t' << detail::format_double(space.provenance[i].score) << '\n';
    }
}

inline void write_feature_space(const FeatureSpace& space, const SeedSets& seeds, size_t k,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write feature space " + path);
    write_feature_space(space, seeds, k, out);
}

struct FeatureSpaceFile {
    FeatureSpace space;
    SeedSets seeds;
    size_t k = 0;
};

inline FeatureSpaceFile read_feature_space(std::istream& in, const std::string& source) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# stancetk feature-space", 0) != 0)
        throw MalformedRecord(source + ": missing feature-space header");
    FeatureSpaceFile file;
    for (const auto& field : detail::split(header, '\t')) {
        const size_t eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "kind") {
            const auto kind = feature_kind_from_name(value);
            if (!kind) throw MalformedRecord(source + ": unknown kind \"" + value + "\"");
            file.space.kind = *kind;
        } else if (key == "k") {
            file.k = std::stoull(value);
        } else if (key == "seeds_yes" && !value.empty()) {
            for (auto& s : detail::split(value, ',')) file.seeds.yes.insert(s);
        } else if (key == "seeds_no" && !value.empty()) {
            for (auto& s : detail::split(value, ',')) file.seeds.no.insert(s);
        }
    }
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto parts = detail::split(line, '\t');
        if (parts.size() != 4)
            throw MalformedRecord(source + ":" + std::to_string(line_no) +
                                  ": expected rank, token, side, score");
        FeatureProvenance p;
        const std::string& side = parts[2];
        if (side == "yes") {
            p.origin = FeatureProvenance::Origin::Yes;
        } else if (side == "no") {
            p.origin = FeatureProvenance::Origin::No;
        } else if (side == "term") {
            p.origin = FeatureProvenance::Origin::Term;
        } else if (!side.empty() && side[0] == 't') {
            p.origin = FeatureProvenance::Origin::Topic;
            p.topic = std::stoi(side.substr(1));
        } else {
            throw MalformedRecord(source + ":" + std::to_string(line_no) +
                                  ": unknown side \"" + side + "\"");
        }
        p.score = std::stod(parts[3]);
        file.space.push(parts[1], p);
    }
    return file;
}

inline FeatureSpaceFile read_feature_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature space " + path);
    return read_feature_space(in, path);
}

inline void write_ranked_list(const RankedFeatureList& list, std::ostream& out) {
    out << "# stancetk ranked-list\tside=" << side_name(list.side) << '\n';
    for (size_t i = 0; i < list.entries.size(); ++i) {
        out << (i + 1) << '\t' << list.entries[i].token << '\t'
            << detail::format_double(list.entries[i].score) << '\n';
    }
}

inline void write_ranked_list(const RankedFeatureList& list, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write ranked list " + path);
    write_ranked_list(list, out);
}

} // namespace stancetk

#endif // STANCETK_DISCOVERY_HPP
