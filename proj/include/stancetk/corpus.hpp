#ifndef STANCETK_CORPUS_HPP
#define STANCETK_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stancetk/errors.hpp"
#include "stancetk/rng.hpp"
#include "stancetk/text.hpp"

namespace stancetk {

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

// Fixed order Yes < No < Ambiguous; ties everywhere break in this order.
enum class ClassLabel : uint8_t { Yes = 0, No = 1, Ambiguous = 2 };

inline constexpr std::array<ClassLabel, 3> kAllLabels = {
    ClassLabel::Yes, ClassLabel::No, ClassLabel::Ambiguous};

inline const char* label_name(ClassLabel l) {
    switch (l) {
        case ClassLabel::Yes: return "yes";
        case ClassLabel::No: return "no";
        case ClassLabel::Ambiguous: return "ambiguous";
    }
    return "?";
}

inline std::optional<ClassLabel> label_from_name(std::string_view s) {
    if (s == "yes") return ClassLabel::Yes;
    if (s == "no") return ClassLabel::No;
    if (s == "ambiguous") return ClassLabel::Ambiguous;
    return std::nullopt;
}

inline size_t label_index(ClassLabel l) { return static_cast<size_t>(l); }

// ---------------------------------------------------------------------------
// Timestamps (ISO-8601 UTC)
// ---------------------------------------------------------------------------

namespace detail {

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
inline int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline void civil_from_days(int64_t z, int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

// "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)" -> epoch seconds. Fractional seconds
// are truncated. Returns nullopt on anything else.
inline std::optional<int64_t> parse_timestamp(std::string_view s) {
    if (s.size() < 20) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    const auto num = [&](size_t pos, size_t len, int& out) {
        const std::string_view part = s.substr(pos, len);
        if (!detail::all_digits(part)) return false;
        out = 0;
        for (char c : part) out = out * 10 + (c - '0');
        return true;
    };
    int year;
    int month;
    int day;
    int hour;
    int minute;
    int second;
    if (!num(0, 4, year) || !num(5, 2, month) || !num(8, 2, day) ||
        !num(11, 2, hour) || !num(14, 2, minute) || !num(17, 2, second))
        return std::nullopt;

    size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        size_t end = pos + 1;
        while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
        if (end == pos + 1) return std::nullopt;
        pos = end;
    }
    const std::string_view zone = s.substr(pos);
    if (zone != "Z" && zone != "+00:00") return std::nullopt;

    static constexpr int days_in_month[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12 || day < 1) return std::nullopt;
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    const int dim = days_in_month[month - 1] + (month == 2 && leap ? 1 : 0);
    if (day > dim || hour > 23 || minute > 59 || second > 59) return std::nullopt;

    return detail::days_from_civil(year, month, day) * 86400 +
           hour * 3600 + minute * 60 + second;
}

inline std::string format_timestamp(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int64_t y;
    unsigned m;
    unsigned d;
    detail::civil_from_days(days, y, m, d);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Tweet {
    std::string id;
    std::string user_id;
    int64_t timestamp = 0;  // epoch seconds, UTC
    std::string text;
    bool is_retweet = false;
    std::optional<std::string> retweet_of;
};

struct UserDocument {
    std::string user_id;
    std::vector<Tweet> tweets;
    ClassLabel label = ClassLabel::Ambiguous;
};

struct LabeledCorpus {
    std::vector<UserDocument> documents;
    std::array<size_t, 3> class_counts{0, 0, 0};

    size_t size() const { return documents.size(); }
};

// ---------------------------------------------------------------------------
// Tweet stream records (JSON Lines)
// ---------------------------------------------------------------------------

inline Tweet parse_tweet_record(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedRecord(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw MalformedRecord("record is not a JSON object");

    const auto str_field = [&](const char* name) -> std::string {
        if (!j.contains(name)) throw MissingField(name);
        const auto& v = j.at(name);
        if (!v.is_string()) throw MalformedRecord(std::string(name) + " is not a string");
        std::string s = v.get<std::string>();
        if (s.empty() && std::string_view(name) != "text") throw MissingField(name);
        return s;
    };

    Tweet t;
    t.id = str_field("id");
    t.user_id = str_field("user_id");
    t.text = str_field("text");

    const std::string ts = str_field("timestamp");
    const auto parsed = parse_timestamp(ts);
    if (!parsed) throw MalformedRecord("bad timestamp \"" + ts + "\"");
    t.timestamp = *parsed;

    if (!j.contains("is_retweet")) throw MissingField("is_retweet");
    if (!j.at("is_retweet").is_boolean())
        throw MalformedRecord("is_retweet is not a boolean");
    t.is_retweet = j.at("is_retweet").get<bool>();

    if (j.contains("retweet_of") && !j.at("retweet_of").is_null()) {
        if (!j.at("retweet_of").is_string())
            throw MalformedRecord("retweet_of is not a string");
        t.retweet_of = j.at("retweet_of").get<std::string>();
        if (!t.is_retweet)
            throw MalformedRecord("retweet_of present on a non-retweet record");
    }
    return t;
}

inline std::string tweet_record_json(const Tweet& t) {
    nlohmann::json j{
        {"id", t.id},
        {"user_id", t.user_id},
        {"timestamp", format_timestamp(t.timestamp)},
        {"text", t.text},
        {"is_retweet", t.is_retweet},
    };
    if (t.retweet_of) j["retweet_of"] = *t.retweet_of;
    return j.dump();
}

inline std::vector<Tweet> read_tweet_stream(std::istream& in, const std::string& source) {
    std::vector<Tweet> tweets;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            tweets.push_back(parse_tweet_record(line));
        } catch (const Error& e) {
            throw MalformedRecord(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return tweets;
}

inline std::vector<Tweet> read_tweet_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tweet stream " + path);
    return read_tweet_stream(in, path);
}

// Merge order is (timestamp, id); stable so equal keys keep input order.
inline void sort_tweet_stream(std::vector<Tweet>& tweets) {
    std::stable_sort(tweets.begin(), tweets.end(), [](const Tweet& a, const Tweet& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.id < b.id;
    });
}

inline std::vector<Tweet> read_tweet_streams(const std::vector<std::string>& paths) {
    std::vector<Tweet> all;
    for (const auto& p : paths) {
        auto part = read_tweet_stream(p);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    sort_tweet_stream(all);
    return all;
}

inline void write_tweet_stream(const std::vector<Tweet>& tweets, std::ostream& out) {
    for (const auto& t : tweets) out << tweet_record_json(t) << '\n';
}

inline void write_tweet_stream(const std::vector<Tweet>& tweets, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write tweet stream " + path);
    write_tweet_stream(tweets, out);
}

// ---------------------------------------------------------------------------
// Labels file: user_id<TAB>label, label in {yes,no,ambiguous}
// ---------------------------------------------------------------------------

inline std::map<std::string, ClassLabel> read_labels(std::istream& in, const std::string& source) {
    std::map<std::string, ClassLabel> labels;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(line_no);
        const size_t tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw MalformedRecord(where + ": expected user_id<TAB>label");
        const std::string user = line.substr(0, tab);
        const std::string name = line.substr(tab + 1);
        if (user.empty()) throw MissingField(where + ": user_id");
        const auto label = label_from_name(name);
        if (!label) throw MalformedRecord(where + ": unknown label \"" + name + "\"");
        if (!labels.emplace(user, *label).second)
            throw MalformedRecord(where + ": duplicate user \"" + user + "\"");
    }
    return labels;
}

inline std::map<std::string, ClassLabel> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file " + path);
    return read_labels(in, path);
}

inline void write_labels(const std::map<std::string, ClassLabel>& labels, std::ostream& out) {
    for (const auto& [user, label] : labels) out << user << '\t' << label_name(label) << '\n';
}

inline void write_labels(const std::map<std::string, ClassLabel>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write labels file " + path);
    write_labels(labels, out);
}

// ---------------------------------------------------------------------------
// Corpus construction
// ---------------------------------------------------------------------------

// One document per labeled user, in user_id order. Tweets of unlabeled users
// are ignored; retweet text participates verbatim.
inline LabeledCorpus build_user_documents(const std::vector<Tweet>& tweets,
                                          const std::map<std::string, ClassLabel>& labels) {
    std::map<std::string, std::vector<Tweet>> by_user;
    for (const auto& t : tweets) {
        if (labels.count(t.user_id)) by_user[t.user_id].push_back(t);
    }
    std::vector<std::string> missing;
    for (const auto& [user, label] : labels) {
        (void)label;
        if (!by_user.count(user)) missing.push_back(user);
    }
    if (!missing.empty()) {
        std::string msg = "labeled users without tweets:";
        for (const auto& u : missing) msg += " " + u;
        throw LabeledUserWithoutTweets(msg);
    }
    LabeledCorpus corpus;
    corpus.documents.reserve(by_user.size());
    for (auto& [user, user_tweets] : by_user) {
        const ClassLabel label = labels.at(user);
        corpus.class_counts[label_index(label)]++;
        corpus.documents.push_back(UserDocument{user, std::move(user_tweets), label});
    }
    return corpus;
}

// Users whose authored retweet count reaches min_retweets. min_retweets = 0
// returns every user in the stream.
inline std::set<std::string> filter_active_users(const std::vector<Tweet>& tweets,
                                                 size_t min_retweets) {
    std::map<std::string, size_t> retweets;
    for (const auto& t : tweets) {
        auto [it, inserted] = retweets.emplace(t.user_id, 0);
        (void)inserted;
        if (t.is_retweet) ++it->second;
    }
    std::set<std::string> active;
    for (const auto& [user, count] : retweets) {
        if (count >= min_retweets) active.insert(user);
    }
    return active;
}

// Equal-population quantile strata over retweet counts; floor(n/n_strata)
// drawn uniformly per stratum with the remainder assigned to the lowest
// strata first. Overfull quotas spill into the following strata.
inline std::set<std::string> stratified_sample_by_activity(
    const std::map<std::string, size_t>& user_stats, size_t n, size_t n_strata,
    uint64_t rng_seed) {
    if (n_strata < 1) throw std::invalid_argument("n_strata must be >= 1");
    const size_t total = user_stats.size();
    if (n > total)
        throw InsufficientUsers("requested " + std::to_string(n) + " of " +
                                std::to_string(total) + " users");

    std::vector<std::pair<size_t, std::string>> by_activity;
    by_activity.reserve(total);
    for (const auto& [user, count] : user_stats) by_activity.emplace_back(count, user);
    std::sort(by_activity.begin(), by_activity.end());

    std::vector<size_t> bounds(n_strata + 1);
    for (size_t s = 0; s <= n_strata; ++s) bounds[s] = s * total / n_strata;

    std::vector<size_t> quota(n_strata, n / n_strata);
    for (size_t s = 0; s < n % n_strata; ++s) quota[s]++;

    // Resolve quotas that exceed a stratum's population before drawing.
    std::vector<size_t> take(n_strata);
    size_t carry = 0;
    for (size_t s = 0; s < n_strata; ++s) {
        const size_t size = bounds[s + 1] - bounds[s];
        take[s] = std::min(quota[s] + carry, size);
        carry = quota[s] + carry - take[s];
    }
    for (size_t s = 0; s < n_strata && carry > 0; ++s) {
        const size_t size = bounds[s + 1] - bounds[s];
        const size_t extra = std::min(carry, size - take[s]);
        take[s] += extra;
        carry -= extra;
    }

    Rng rng(rng_seed);
    std::set<std::string> sampled;
    for (size_t s = 0; s < n_strata; ++s) {
        std::vector<std::string> members;
        members.reserve(bounds[s + 1] - bounds[s]);
        for (size_t i = bounds[s]; i < bounds[s + 1]; ++i) members.push_back(by_activity[i].second);
        rng.shuffle(members);
        for (size_t i = 0; i < take[s]; ++i) sampled.insert(members[i]);
    }
    return sampled;
}

} // namespace stancetk

#endif // STANCETK_CORPUS_HPP
