#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "stancetk/corpus.hpp"
#include "stancetk/synth.hpp"

using namespace stancetk;
using testutil::make_tweet;

TEST_CASE("parse_tweet_record maps fields directly") {
    const Tweet t = parse_tweet_record(
        R"({"id":"1","user_id":"u1","timestamp":"2017-04-16T00:00:00Z","text":"#EVET","is_retweet":false})");
    CHECK(t.id == "1");
    CHECK(t.user_id == "u1");
    CHECK(t.text == "#EVET");
    CHECK_FALSE(t.is_retweet);
    CHECK_FALSE(t.retweet_of.has_value());
}

TEST_CASE("parse_tweet_record contract errors") {
    CHECK_THROWS_AS(parse_tweet_record(
                        R"({"id":"1","timestamp":"2017-04-16T00:00:00Z","text":"x","is_retweet":false})"),
                    MissingField);
    CHECK_THROWS_AS(parse_tweet_record("not json"), MalformedRecord);
    CHECK_THROWS_AS(parse_tweet_record(
                        R"({"id":"1","user_id":"u1","timestamp":"yesterday","text":"x","is_retweet":false})"),
                    MalformedRecord);
    // retweet_of implies is_retweet
    CHECK_THROWS_AS(parse_tweet_record(
                        R"({"id":"1","user_id":"u1","timestamp":"2017-04-16T00:00:00Z","text":"x","is_retweet":false,"retweet_of":"9"})"),
                    MalformedRecord);
}

TEST_CASE("parse_tweet_record keeps retweet linkage") {
    const Tweet t = parse_tweet_record(
        R"({"id":"2","user_id":"u1","timestamp":"2017-04-16T00:00:00Z","text":"RT","is_retweet":true,"retweet_of":"9"})");
    CHECK(t.is_retweet);
    REQUIRE(t.retweet_of.has_value());
    CHECK(*t.retweet_of == "9");
}

TEST_CASE("timestamps parse and format as ISO-8601 UTC") {
    CHECK(parse_timestamp("2017-04-16T12:34:56Z").value() ==
          parse_timestamp("2017-04-16T12:34:56+00:00").value());
    CHECK(parse_timestamp("2017-04-16T12:34:56.123Z").value() ==
          parse_timestamp("2017-04-16T12:34:56Z").value());
    CHECK_FALSE(parse_timestamp("2017-04-31T00:00:00Z"));  // April has 30 days
    CHECK_FALSE(parse_timestamp("2017-13-01T00:00:00Z"));
    CHECK_FALSE(parse_timestamp("2017-04-16T24:00:00Z"));
    CHECK_FALSE(parse_timestamp("2017-04-16 12:34:56Z"));
    CHECK_FALSE(parse_timestamp("2017-04-16T12:34:56+03:00"));
    const auto ts = parse_timestamp("2016-02-29T23:59:59Z");
    REQUIRE(ts.has_value());
    CHECK(format_timestamp(*ts) == "2016-02-29T23:59:59Z");
}

TEST_CASE("tweet records round-trip through JSON lines") {
    Tweet t = make_tweet("42", "u7", "#EVET oy", 1492340096, true);
    t.retweet_of = "41";
    const Tweet back = parse_tweet_record(tweet_record_json(t));
    CHECK(back.id == t.id);
    CHECK(back.user_id == t.user_id);
    CHECK(back.timestamp == t.timestamp);
    CHECK(back.text == t.text);
    CHECK(back.is_retweet == t.is_retweet);
    CHECK(back.retweet_of == t.retweet_of);
}

TEST_CASE("build_user_documents filters to labeled users") {
    std::vector<Tweet> tweets = {
        make_tweet("1", "u1", "a"), make_tweet("2", "u1", "b"), make_tweet("3", "u1", "c"),
        make_tweet("4", "u2", "d")};
    const std::map<std::string, ClassLabel> labels = {{"u1", ClassLabel::Yes}};
    const LabeledCorpus corpus = build_user_documents(tweets, labels);
    REQUIRE(corpus.documents.size() == 1);
    CHECK(corpus.documents[0].user_id == "u1");
    CHECK(corpus.documents[0].tweets.size() == 3);
    CHECK(corpus.class_counts == std::array<size_t, 3>{1, 0, 0});
}

TEST_CASE("build_user_documents reports labeled users without tweets") {
    const std::vector<Tweet> tweets = {make_tweet("1", "u1", "a")};
    const std::map<std::string, ClassLabel> labels = {{"u1", ClassLabel::Yes},
                                                      {"u2", ClassLabel::No}};
    CHECK_THROWS_AS(build_user_documents(tweets, labels), LabeledUserWithoutTweets);
}

TEST_CASE("document invariants hold on a synthetic corpus") {
    SynthConfig cfg;
    cfg.n_users = 120;
    cfg.tweets_min = 2;
    cfg.tweets_max = 5;
    const auto [tweets, labels] = generate_synthetic_corpus(cfg);
    const LabeledCorpus corpus = build_user_documents(tweets, labels);
    CHECK(corpus.class_counts[0] + corpus.class_counts[1] + corpus.class_counts[2] ==
          corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        CHECK_FALSE(doc.tweets.empty());
        for (const auto& t : doc.tweets) CHECK(t.user_id == doc.user_id);
    }
}

TEST_CASE("default corpus shape matches the reference split") {
    SynthConfig cfg;  // defaults mirror the 2000-user split
    cfg.tweets_min = 1;
    cfg.tweets_max = 2;
    const auto [tweets, labels] = generate_synthetic_corpus(cfg);
    const LabeledCorpus corpus = build_user_documents(tweets, labels);
    CHECK(corpus.documents.size() == 2000);
    CHECK(corpus.class_counts == std::array<size_t, 3>{826, 782, 392});
}

TEST_CASE("filter_active_users boundary is inclusive") {
    std::vector<Tweet> tweets;
    for (int i = 0; i < 10; ++i)
        tweets.push_back(make_tweet("a" + std::to_string(i), "u1", "x", 0, true));
    for (int i = 0; i < 9; ++i)
        tweets.push_back(make_tweet("b" + std::to_string(i), "u2", "x", 0, true));
    CHECK(filter_active_users(tweets, 10) == std::set<std::string>{"u1"});
    CHECK(filter_active_users(tweets, 0) == std::set<std::string>{"u1", "u2"});
    CHECK(filter_active_users({}, 3).empty());
}

TEST_CASE("filter_active_users is monotone in the threshold") {
    Rng rng(55);
    std::vector<Tweet> tweets;
    for (int i = 0; i < 200; ++i)
        tweets.push_back(make_tweet("t" + std::to_string(i), "u" + std::to_string(rng.index(20)),
                                    "x", 0, rng.bernoulli(0.5)));
    auto previous = filter_active_users(tweets, 0);
    for (size_t min = 1; min < 8; ++min) {
        const auto current = filter_active_users(tweets, min);
        for (const auto& u : current) CHECK(previous.count(u) == 1);
        previous = current;
    }
}

TEST_CASE("stratified sampling draws evenly from activity quartiles") {
    std::map<std::string, size_t> stats;
    for (size_t i = 0; i < 16; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "u%02zu", i);
        stats[buf] = i;  // activity equals index, so quartiles are index ranges
    }
    const auto sampled = stratified_sample_by_activity(stats, 8, 4, 9);
    REQUIRE(sampled.size() == 8);
    std::array<size_t, 4> per_quartile{0, 0, 0, 0};
    for (const auto& u : sampled) per_quartile[std::stoul(u.substr(1)) / 4]++;
    CHECK(per_quartile == std::array<size_t, 4>{2, 2, 2, 2});

    CHECK(stratified_sample_by_activity(stats, 16, 4, 9).size() == 16);
    CHECK(stratified_sample_by_activity(stats, 8, 4, 9) == sampled);  // determinism
    CHECK_THROWS_AS(stratified_sample_by_activity(stats, 17, 4, 9), InsufficientUsers);
}

TEST_CASE("labels file round-trips and rejects bad input") {
    const std::map<std::string, ClassLabel> labels = {
        {"u1", ClassLabel::Yes}, {"u2", ClassLabel::No}, {"u3", ClassLabel::Ambiguous}};
    std::ostringstream out;
    write_labels(labels, out);
    std::istringstream in(out.str());
    CHECK(read_labels(in, "mem") == labels);

    std::istringstream bad_label("u1\tmaybe\n");
    CHECK_THROWS_AS(read_labels(bad_label, "mem"), MalformedRecord);
    std::istringstream duplicate("u1\tyes\nu1\tno\n");
    CHECK_THROWS_AS(read_labels(duplicate, "mem"), MalformedRecord);
}

TEST_CASE("merged streams sort by timestamp then id") {
    std::vector<Tweet> a = {make_tweet("9", "u1", "x", 100), make_tweet("2", "u1", "x", 300)};
    std::vector<Tweet> b = {make_tweet("5", "u2", "x", 100), make_tweet("1", "u2", "x", 200)};
    std::vector<Tweet> all;
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    sort_tweet_stream(all);
    std::vector<std::string> ids;
    for (const auto& t : all) ids.push_back(t.id);
    CHECK(ids == std::vector<std::string>{"5", "9", "1", "2"});
}

TEST_CASE("synthetic class counts follow largest-remainder rounding") {
    CHECK(class_counts_for({0.413, 0.391, 0.196}, 2000) ==
          std::array<size_t, 3>{826, 782, 392});
    const auto thirds = class_counts_for({1.0 / 3, 1.0 / 3, 1.0 / 3}, 100);
    CHECK(thirds[0] + thirds[1] + thirds[2] == 100);
    CHECK(thirds == std::array<size_t, 3>{34, 33, 33});  // label order breaks the tie
}

TEST_CASE("injection_rate zero means no opposing seeds in partisan tweets") {
    SynthConfig cfg;
    cfg.n_users = 80;
    cfg.tweets_min = 3;
    cfg.tweets_max = 6;
    cfg.injection_rate = 0.0;
    const auto [tweets, labels] = generate_synthetic_corpus(cfg);
    const SeedSets seeds = default_seed_sets();
    for (const auto& t : tweets) {
        const auto it = labels.find(t.user_id);
        REQUIRE(it != labels.end());
        for (const auto& tag : extract_hashtags(t.text)) {
            if (it->second == ClassLabel::Yes) CHECK_FALSE(seeds.is_no(tag));
            if (it->second == ClassLabel::No) CHECK_FALSE(seeds.is_yes(tag));
        }
    }
}

TEST_CASE("synthetic generation is byte-identical under a fixed seed") {
    SynthConfig cfg;
    cfg.n_users = 60;
    cfg.tweets_min = 2;
    cfg.tweets_max = 7;
    cfg.injection_rate = 0.3;
    const auto [tweets_a, labels_a] = generate_synthetic_corpus(cfg);
    const auto [tweets_b, labels_b] = generate_synthetic_corpus(cfg);
    REQUIRE(tweets_a.size() == tweets_b.size());
    std::ostringstream a;
    std::ostringstream b;
    write_tweet_stream(tweets_a, a);
    write_tweet_stream(tweets_b, b);
    CHECK(a.str() == b.str());
    CHECK(labels_a == labels_b);
}

TEST_CASE("invalid synthetic configs are rejected") {
    SynthConfig cfg;
    cfg.class_proportions = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(generate_synthetic_corpus(cfg), InvalidConfig);
    SynthConfig bad_rate;
    bad_rate.injection_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic_corpus(bad_rate), InvalidConfig);
}
