// stancetk — stance classification experiments on tweet-like corpora.
//
// One subcommand per pipeline stage: synth, ingest, sample, discover,
// lda-train, featurize, train, cv, sweep, baseline, report. Every run writes
// a manifest with resolved parameters and output checksums next to its
// artifacts. Exit codes: 0 success, 1 usage error, 2 data/contract error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stancetk/stancetk.hpp"

namespace fs = std::filesystem;
using namespace stancetk;

namespace {

struct CommonOpts {
    std::vector<std::string> corpus_paths;
    std::string labels_path;
    std::string out_dir = ".";
    std::string seeds_yes = "#EVET,#Evet,#evet";
    std::string seeds_no = "#HAYIR,#Hayır,#hayır";
    uint64_t seed = 0;
    bool seed_given = false;
};

SeedSets parse_seeds(const std::string& yes, const std::string& no) {
    SeedSets seeds;
    for (const auto& tag : detail::split(yes, ','))
        if (!tag.empty()) seeds.yes.insert(tag);
    for (const auto& tag : detail::split(no, ','))
        if (!tag.empty()) seeds.no.insert(tag);
    validate(seeds);
    return seeds;
}

uint64_t resolve_seed(CommonOpts& opts) {
    if (!opts.seed_given) {
        std::random_device rd;
        opts.seed = (static_cast<uint64_t>(rd()) << 32) | rd();
    }
    return opts.seed;
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

LabeledCorpus load_corpus(const CommonOpts& opts, RunManifest& manifest) {
    if (opts.corpus_paths.empty()) throw IoError("no corpus file given");
    if (opts.labels_path.empty()) throw IoError("no labels file given");
    for (const auto& p : opts.corpus_paths) manifest.inputs.push_back(p);
    manifest.inputs.push_back(opts.labels_path);
    const auto tweets = read_tweet_streams(opts.corpus_paths);
    const auto labels = read_labels(opts.labels_path);
    return build_user_documents(tweets, labels);
}

// Runs a command body inside the manifest envelope; the manifest is written
// even when the body throws.
int run_command(const std::string& name, CommonOpts& opts, RunManifest& manifest,
                const std::function<void()>& body) {
    manifest.command = name;
    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        body();
    } catch (const Error& e) {
        manifest.error = {e.name(), e.what()};
        code = 2;
        std::cerr << e.what() << '\n';
    } catch (const std::exception& e) {
        manifest.error = {"InternalError", e.what()};
        code = 2;
        std::cerr << "error: " << e.what() << '\n';
    }
    manifest.rng_seed = opts.seed;
    manifest.exit_code = code;
    manifest.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    try {
        write_manifest(manifest, out_path(opts, name + "_manifest.json"));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = code ? code : 2;
    }
    return code;
}

enum class Needs { Nothing, Corpus, CorpusAndLabels };

void add_common(CLI::App* cmd, CommonOpts& opts, Needs needs) {
    if (needs != Needs::Nothing) {
        auto* corpus = cmd->add_option("--corpus", opts.corpus_paths,
                                       "tweet stream file(s), JSON lines");
        corpus->required();
        auto* labels =
            cmd->add_option("--labels", opts.labels_path, "labels file (user_id<TAB>label)");
        if (needs == Needs::CorpusAndLabels) labels->required();
    }
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seeds-yes", opts.seeds_yes, "comma-separated yes seed hashtags")
        ->capture_default_str();
    cmd->add_option("--seeds-no", opts.seeds_no, "comma-separated no seed hashtags")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "RNG seed (omit for a recorded random seed)")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
}

std::string join_paths(const std::vector<std::string>& paths) {
    std::string out;
    for (const auto& p : paths) {
        if (!out.empty()) out += ',';
        out += p;
    }
    return out;
}

void record_common(const CommonOpts& opts, RunManifest& manifest) {
    if (!opts.corpus_paths.empty()) manifest.parameters["corpus"] = join_paths(opts.corpus_paths);
    if (!opts.labels_path.empty()) manifest.parameters["labels"] = opts.labels_path;
    manifest.parameters["out"] = opts.out_dir;
    manifest.parameters["seed"] = std::to_string(opts.seed);
    manifest.parameters["seeds_yes"] = opts.seeds_yes;
    manifest.parameters["seeds_no"] = opts.seeds_no;
}

void record_train(const TrainConfig& cfg, RunManifest& manifest) {
    manifest.parameters["C"] = std::to_string(cfg.C);
    manifest.parameters["tol"] = std::to_string(cfg.tol);
    manifest.parameters["max_epochs"] = std::to_string(cfg.max_epochs);
    manifest.parameters["min_leaf"] = std::to_string(cfg.min_leaf);
    manifest.parameters["trees"] = std::to_string(cfg.n_trees);
}

void record_lda(const LdaParams& lda, RunManifest& manifest) {
    manifest.parameters["topics"] = std::to_string(lda.topics);
    manifest.parameters["iterations"] = std::to_string(lda.iterations);
    manifest.parameters["dict_size"] = std::to_string(lda.dict_size);
    manifest.parameters["sample_size"] = std::to_string(lda.sample_size);
    manifest.parameters["alpha"] = std::to_string(lda.alpha);
    manifest.parameters["beta"] = std::to_string(lda.beta);
}

} // namespace

int dispatch(int argc, char** argv) {
    CLI::App app{"stance classification toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    int exit_code = 0;
    const auto run = [&](const std::string& name, CommonOpts& opts, RunManifest& manifest,
                         const std::function<void()>& body) {
        exit_code = run_command(name, opts, manifest, body);
    };

    // ---------------------------------------------------------------- synth
    {
        auto* cmd = app.add_subcommand("synth", "generate a synthetic corpus with planted structure");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto cfg = std::make_shared<SynthConfig>();
        auto users = std::make_shared<size_t>(2000);
        auto proportions = std::make_shared<std::string>("0.413,0.391,0.196");
        add_common(cmd, *opts, Needs::Nothing);
        cmd->add_option("--users", *users, "number of users")->capture_default_str();
        cmd->add_option("--proportions", *proportions, "yes,no,ambiguous class proportions")
            ->capture_default_str();
        cmd->add_option("--tweets-min", cfg->tweets_min, "min tweets per user")->capture_default_str();
        cmd->add_option("--tweets-max", cfg->tweets_max, "max tweets per user")->capture_default_str();
        cmd->add_option("--vocab-per-class", cfg->vocab_per_class, "class vocabulary size")
            ->capture_default_str();
        cmd->add_option("--shared-vocab", cfg->shared_vocab, "shared vocabulary size")
            ->capture_default_str();
        cmd->add_option("--hashtags-per-class", cfg->hashtags_per_class,
                        "planted side hashtags per class")
            ->capture_default_str();
        cmd->add_option("--injection-rate", cfg->injection_rate,
                        "probability a partisan tweet carries the opposing seed")
            ->capture_default_str();
        cmd->add_option("--spam-topics", cfg->spam_topics, "spam topic count")->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("synth", *opts, *manifest, [&] {
                cfg->n_users = *users;
                const auto parts = detail::split(*proportions, ',');
                if (parts.size() != 3) throw InvalidConfig("expected three proportions");
                for (size_t i = 0; i < 3; ++i) cfg->class_proportions[i] = std::stod(parts[i]);
                cfg->rng_seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["users"] = std::to_string(cfg->n_users);
                manifest->parameters["proportions"] = *proportions;
                manifest->parameters["tweets_min"] = std::to_string(cfg->tweets_min);
                manifest->parameters["tweets_max"] = std::to_string(cfg->tweets_max);
                manifest->parameters["vocab_per_class"] = std::to_string(cfg->vocab_per_class);
                manifest->parameters["shared_vocab"] = std::to_string(cfg->shared_vocab);
                manifest->parameters["hashtags_per_class"] =
                    std::to_string(cfg->hashtags_per_class);
                manifest->parameters["injection_rate"] = std::to_string(cfg->injection_rate);
                manifest->parameters["spam_topics"] = std::to_string(cfg->spam_topics);
                manifest->rng_seed = cfg->rng_seed;

                const auto [tweets, labels] = generate_synthetic_corpus(*cfg);
                const auto tweets_path = out_path(*opts, "tweets.jsonl");
                const auto labels_path = out_path(*opts, "labels.tsv");
                write_tweet_stream(tweets, tweets_path);
                write_labels(labels, labels_path);
                manifest->add_output(tweets_path);
                manifest->add_output(labels_path);
                std::cout << "wrote " << tweets.size() << " tweets for " << labels.size()
                          << " users\n";
            });
        });
    }

    // --------------------------------------------------------------- ingest
    {
        auto* cmd = app.add_subcommand("ingest", "parse, validate and merge tweet streams");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        add_common(cmd, *opts, Needs::Corpus);
        cmd->callback([=, &exit_code] {
            run("ingest", *opts, *manifest, [&] {
                if (opts->corpus_paths.empty()) throw IoError("no corpus file given");
                resolve_seed(*opts);
                record_common(*opts, *manifest);
                for (const auto& p : opts->corpus_paths) manifest->inputs.push_back(p);
                const auto tweets = read_tweet_streams(opts->corpus_paths);
                const auto merged_path = out_path(*opts, "tweets.jsonl");
                write_tweet_stream(tweets, merged_path);
                manifest->add_output(merged_path);
                std::cout << "merged " << tweets.size() << " tweets from "
                          << opts->corpus_paths.size() << " file(s)\n";
                if (!opts->labels_path.empty()) {
                    manifest->inputs.push_back(opts->labels_path);
                    const auto labels = read_labels(opts->labels_path);
                    const auto corpus = build_user_documents(tweets, labels);
                    std::cout << "documents: " << corpus.documents.size()
                              << " (yes=" << corpus.class_counts[0]
                              << " no=" << corpus.class_counts[1]
                              << " ambiguous=" << corpus.class_counts[2] << ")\n";
                }
            });
        });
    }

    // --------------------------------------------------------------- sample
    {
        auto* cmd = app.add_subcommand("sample", "retweet-activity filter and stratified user sample");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto min_retweets = std::make_shared<size_t>(10);
        auto n = std::make_shared<size_t>(2000);
        auto strata = std::make_shared<size_t>(4);
        add_common(cmd, *opts, Needs::Corpus);
        cmd->add_option("--min-retweets", *min_retweets, "minimum authored retweets")
            ->capture_default_str();
        cmd->add_option("--n", *n, "sample size")->capture_default_str();
        cmd->add_option("--strata", *strata, "number of activity strata")->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("sample", *opts, *manifest, [&] {
                if (opts->corpus_paths.empty()) throw IoError("no corpus file given");
                const uint64_t seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["min_retweets"] = std::to_string(*min_retweets);
                manifest->parameters["n"] = std::to_string(*n);
                manifest->parameters["strata"] = std::to_string(*strata);
                for (const auto& p : opts->corpus_paths) manifest->inputs.push_back(p);

                const auto tweets = read_tweet_streams(opts->corpus_paths);
                const auto active = filter_active_users(tweets, *min_retweets);
                std::map<std::string, size_t> stats;
                for (const auto& t : tweets)
                    if (active.count(t.user_id) && t.is_retweet) stats[t.user_id]++;
                for (const auto& u : active) stats.emplace(u, 0);
                const auto sampled = stratified_sample_by_activity(stats, *n, *strata, seed);

                const auto users_path = out_path(*opts, "users.txt");
                {
                    std::ofstream out(users_path);
                    if (!out) throw IoError("cannot write " + users_path);
                    for (const auto& u : sampled) out << u << '\n';
                }
                manifest->add_output(users_path);
                std::cout << "sampled " << sampled.size() << " of " << active.size()
                          << " active users\n";

                if (!opts->labels_path.empty()) {
                    manifest->inputs.push_back(opts->labels_path);
                    const auto labels = read_labels(opts->labels_path);
                    std::map<std::string, ClassLabel> kept;
                    for (const auto& u : sampled) {
                        const auto it = labels.find(u);
                        if (it != labels.end()) kept.emplace(*it);
                    }
                    const auto kept_path = out_path(*opts, "sampled_labels.tsv");
                    write_labels(kept, kept_path);
                    manifest->add_output(kept_path);
                }
            });
        });
    }

    // ------------------------------------------------------------- discover
    {
        auto* cmd = app.add_subcommand(
            "discover", "rank seed-co-occurring features and build a disjoint feature space");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto kind_name = std::make_shared<std::string>("hashtag");
        auto k = std::make_shared<size_t>(100);
        add_common(cmd, *opts, Needs::CorpusAndLabels);
        cmd->add_option("--features", *kind_name, "hashtag or bow")->capture_default_str();
        cmd->add_option("--k", *k, "top-k per side")->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("discover", *opts, *manifest, [&] {
                resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["features"] = *kind_name;
                manifest->parameters["k"] = std::to_string(*k);
                const auto kind = feature_kind_from_name(*kind_name);
                if (!kind || (*kind != FeatureKind::Hashtag && *kind != FeatureKind::Bow))
                    throw InvalidConfig("discover supports --features hashtag|bow");
                const auto seeds = parse_seeds(opts->seeds_yes, opts->seeds_no);
                const auto corpus = load_corpus(*opts, *manifest);

                const auto index = index_token_tweets(
                    corpus, seeds,
                    *kind == FeatureKind::Hashtag ? TokenKind::Hashtag : TokenKind::Word);
                const auto [yes_ranked, no_ranked] = score_candidates(index);
                const auto [yes_list, no_list] = assign_disjoint(yes_ranked, no_ranked, seeds);
                const auto space = build_feature_space(yes_list, no_list, *k, *kind);

                const auto space_path =
                    out_path(*opts, "space_" + *kind_name + "_" + std::to_string(*k) + ".tsv");
                write_feature_space(space, seeds, *k, space_path);
                manifest->add_output(space_path);
                const auto yes_path = out_path(*opts, "ranked_yes.tsv");
                const auto no_path = out_path(*opts, "ranked_no.tsv");
                write_ranked_list(yes_ranked, yes_path);
                write_ranked_list(no_ranked, no_path);
                manifest->add_output(yes_path);
                manifest->add_output(no_path);
                std::cout << "assigned " << yes_list.entries.size() << " yes / "
                          << no_list.entries.size() << " no features; space size "
                          << space.size() << '\n';
            });
        });
    }

    // ------------------------------------------------------------ lda-train
    {
        auto* cmd = app.add_subcommand("lda-train", "train the collapsed-Gibbs LDA model");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto params = std::make_shared<LdaParams>();
        add_common(cmd, *opts, Needs::CorpusAndLabels);
        cmd->add_option("--topics", params->topics, "topic count")->capture_default_str();
        cmd->add_option("--iterations", params->iterations, "Gibbs sweeps")->capture_default_str();
        cmd->add_option("--dict-size", params->dict_size, "dictionary cap")->capture_default_str();
        cmd->add_option("--sample-size", params->sample_size, "documents sampled for training")
            ->capture_default_str();
        cmd->add_option("--alpha", params->alpha, "doc-topic prior (<=0 selects 50/topics)")
            ->capture_default_str();
        cmd->add_option("--beta", params->beta, "topic-word prior")->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("lda-train", *opts, *manifest, [&] {
                const uint64_t seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                record_lda(*params, *manifest);
                const auto corpus = load_corpus(*opts, *manifest);
                const auto model =
                    lda_train(corpus, params->topics, params->iterations, params->dict_size,
                              params->sample_size, params->alpha, params->beta, seed);
                const auto model_path = out_path(*opts, "lda_model.txt");
                write_lda_model(model, model_path);
                manifest->add_output(model_path);
                std::cout << "trained " << model.n_topics << " topics over "
                          << model.dictionary.size() << " terms\n";
            });
        });
    }

    // ------------------------------------------------------------ featurize
    {
        auto* cmd = app.add_subcommand("featurize", "vectorize a corpus into a sparse matrix");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto kind_name = std::make_shared<std::string>("");
        auto k = std::make_shared<size_t>(100);
        auto space_path = std::make_shared<std::string>("");
        auto model_path = std::make_shared<std::string>("");
        add_common(cmd, *opts, Needs::CorpusAndLabels);
        cmd->add_option("--features", *kind_name, "hashtag|bow|tfidf|lda (builds the space)");
        cmd->add_option("--k", *k, "top-k for a built space")->capture_default_str();
        cmd->add_option("--space", *space_path, "existing feature-space file");
        cmd->add_option("--model", *model_path, "LDA model file (with --features lda)");
        cmd->callback([=, &exit_code] {
            run("featurize", *opts, *manifest, [&] {
                const uint64_t seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["features"] = *kind_name;
                manifest->parameters["k"] = std::to_string(*k);
                if (!space_path->empty()) manifest->parameters["space"] = *space_path;
                if (!model_path->empty()) manifest->parameters["model"] = *model_path;
                const auto corpus = load_corpus(*opts, *manifest);

                FeatureSpace space;
                IdfTable idf;
                if (!space_path->empty()) {
                    manifest->inputs.push_back(*space_path);
                    space = read_feature_space(*space_path).space;
                } else {
                    const auto kind = feature_kind_from_name(*kind_name);
                    if (!kind) throw InvalidConfig("need --space or a valid --features kind");
                    if (*kind == FeatureKind::Lda) {
                        if (model_path->empty())
                            throw InvalidConfig("--features lda needs --model");
                        manifest->inputs.push_back(*model_path);
                        space = lda_feature_space(read_lda_model(*model_path), *k);
                    } else if (*kind == FeatureKind::Tfidf) {
                        space = select_top_frequent_terms(corpus, *k);
                    } else {
                        FeatureConfig fcfg;
                        fcfg.kind = *kind;
                        fcfg.k = *k;
                        fcfg.seeds = parse_seeds(opts->seeds_yes, opts->seeds_no);
                        space = fit_features(corpus, fcfg, seed).space;
                    }
                    const auto built_path = out_path(*opts, "space.tsv");
                    write_feature_space(space, parse_seeds(opts->seeds_yes, opts->seeds_no), *k,
                                        built_path);
                    manifest->add_output(built_path);
                }
                if (space.kind == FeatureKind::Tfidf) idf = compute_idf(corpus, space);
                const auto matrix = vectorize_corpus(
                    corpus, space, space.kind == FeatureKind::Tfidf ? &idf : nullptr);
                const auto matrix_path = out_path(*opts, "matrix.tsv");
                write_matrix(matrix, space.kind, matrix_path);
                manifest->add_output(matrix_path);
                std::cout << "wrote " << matrix.rows.size() << " x " << matrix.dimension
                          << " matrix\n";
            });
        });
    }

    // ---------------------------------------------------------------- train
    {
        auto* cmd = app.add_subcommand("train", "train a classifier on a feature matrix");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto matrix_path = std::make_shared<std::string>("");
        auto classifier = std::make_shared<std::string>("svm");
        auto tcfg = std::make_shared<TrainConfig>();
        add_common(cmd, *opts, Needs::Nothing);
        cmd->add_option("--matrix", *matrix_path, "feature matrix file")->required();
        cmd->add_option("--classifier", *classifier, "svm|tree|forest")->capture_default_str();
        cmd->add_option("--C", tcfg->C, "SVM soft-margin C")->capture_default_str();
        cmd->add_option("--tol", tcfg->tol, "SVM stopping tolerance")->capture_default_str();
        cmd->add_option("--max-epochs", tcfg->max_epochs, "SVM epoch cap")->capture_default_str();
        cmd->add_option("--min-leaf", tcfg->min_leaf, "tree minimum leaf size")
            ->capture_default_str();
        cmd->add_option("--trees", tcfg->n_trees, "forest size")->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("train", *opts, *manifest, [&] {
                tcfg->rng_seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["matrix"] = *matrix_path;
                manifest->parameters["classifier"] = *classifier;
                record_train(*tcfg, *manifest);
                manifest->inputs.push_back(*matrix_path);
                const auto kind = classifier_from_name(*classifier);
                if (!kind) throw InvalidConfig("unknown classifier " + *classifier);
                tcfg->classifier = *kind;
                const auto matrix = read_matrix(*matrix_path).matrix;
                std::string path;
                switch (*kind) {
                    case ClassifierKind::Svm:
                        path = out_path(*opts, "svm_model.txt");
                        write_svm_model(svm_train(matrix, *tcfg), path);
                        break;
                    case ClassifierKind::Tree:
                        path = out_path(*opts, "tree_model.txt");
                        write_tree_model(tree_train(matrix, *tcfg), path);
                        break;
                    case ClassifierKind::Forest:
                        path = out_path(*opts, "forest_model.txt");
                        write_forest_model(forest_train(matrix, *tcfg), path);
                        break;
                }
                manifest->add_output(path);
                std::cout << "wrote " << path << '\n';
            });
        });
    }

    // ------------------------------------------------------------------- cv
    {
        auto* cmd = app.add_subcommand("cv", "stratified k-fold cross-validation of one cell");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto kind_name = std::make_shared<std::string>("");
        auto k = std::make_shared<size_t>(100);
        auto classifier = std::make_shared<std::string>("svm");
        auto folds_k = std::make_shared<uint32_t>(10);
        auto tcfg = std::make_shared<TrainConfig>();
        auto lda = std::make_shared<LdaParams>();
        add_common(cmd, *opts, Needs::CorpusAndLabels);
        cmd->add_option("--features", *kind_name, "hashtag|bow|tfidf|lda")->required();
        cmd->add_option("--k", *k, "feature-space k")->capture_default_str();
        cmd->add_option("--classifier", *classifier, "svm|tree|forest")->capture_default_str();
        cmd->add_option("--folds", *folds_k, "fold count")->capture_default_str();
        cmd->add_option("--C", tcfg->C, "SVM soft-margin C")->capture_default_str();
        cmd->add_option("--tol", tcfg->tol, "SVM stopping tolerance")->capture_default_str();
        cmd->add_option("--max-epochs", tcfg->max_epochs, "SVM epoch cap")->capture_default_str();
        cmd->add_option("--min-leaf", tcfg->min_leaf, "tree minimum leaf size")
            ->capture_default_str();
        cmd->add_option("--trees", tcfg->n_trees, "forest size")->capture_default_str();
        cmd->add_option("--topics", lda->topics, "LDA topics")->capture_default_str();
        cmd->add_option("--iterations", lda->iterations, "LDA sweeps")->capture_default_str();
        cmd->add_option("--dict-size", lda->dict_size, "LDA dictionary cap")->capture_default_str();
        cmd->add_option("--sample-size", lda->sample_size, "LDA sample size")
            ->capture_default_str();
        cmd->add_option("--alpha", lda->alpha, "LDA alpha (<=0 selects 50/topics)")
            ->capture_default_str();
        cmd->add_option("--beta", lda->beta, "LDA beta")->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("cv", *opts, *manifest, [&] {
                tcfg->rng_seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["features"] = *kind_name;
                manifest->parameters["k"] = std::to_string(*k);
                manifest->parameters["classifier"] = *classifier;
                manifest->parameters["folds"] = std::to_string(*folds_k);
                record_train(*tcfg, *manifest);
                record_lda(*lda, *manifest);
                const auto kind = feature_kind_from_name(*kind_name);
                if (!kind) throw InvalidConfig("unknown feature kind " + *kind_name);
                const auto ckind = classifier_from_name(*classifier);
                if (!ckind) throw InvalidConfig("unknown classifier " + *classifier);
                tcfg->classifier = *ckind;

                const auto corpus = load_corpus(*opts, *manifest);
                FeatureConfig fcfg;
                fcfg.kind = *kind;
                fcfg.k = *k;
                fcfg.seeds = parse_seeds(opts->seeds_yes, opts->seeds_no);
                fcfg.lda = *lda;
                const auto folds = stratified_folds(corpus, *folds_k, tcfg->rng_seed);
                const auto m = cross_validate(corpus, fcfg, *tcfg, folds);
                const SweepRow row{*kind_name, *k, *classifier, accuracy(m), m};
                const auto cm_path = out_path(*opts, sidecar_name(row));
                write_confusion(m, cm_path);
                manifest->add_output(cm_path);
                std::cout << "accuracy " << detail::format_accuracy(row.accuracy) << " ("
                          << m.trace() << "/" << m.total() << ")\n";
            });
        });
    }

    // ---------------------------------------------------------------- sweep
    {
        auto* cmd = app.add_subcommand("sweep", "cross-validate a grid of (kind, k, classifier)");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto kinds_arg = std::make_shared<std::string>("hashtag,bow,tfidf,lda");
        auto k_grid = std::make_shared<std::string>("");
        auto classifiers_arg = std::make_shared<std::string>("svm,tree,forest");
        auto folds_k = std::make_shared<uint32_t>(10);
        auto jobs = std::make_shared<uint32_t>(1);
        auto no_baseline = std::make_shared<bool>(false);
        auto tcfg = std::make_shared<TrainConfig>();
        auto lda = std::make_shared<LdaParams>();
        add_common(cmd, *opts, Needs::CorpusAndLabels);
        cmd->add_option("--features", *kinds_arg, "comma list of feature kinds")
            ->capture_default_str();
        cmd->add_option("--k-grid", *k_grid,
                        "comma list of k values (default: built-in grid per kind)");
        cmd->add_option("--classifier", *classifiers_arg, "comma list of classifiers")
            ->capture_default_str();
        cmd->add_option("--folds", *folds_k, "fold count")->capture_default_str();
        cmd->add_option("--jobs", *jobs, "concurrent grid cells")->capture_default_str();
        cmd->add_flag("--no-baseline", *no_baseline, "skip the baseline row");
        cmd->add_option("--C", tcfg->C, "SVM soft-margin C")->capture_default_str();
        cmd->add_option("--trees", tcfg->n_trees, "forest size")->capture_default_str();
        cmd->add_option("--topics", lda->topics, "LDA topics")->capture_default_str();
        cmd->add_option("--iterations", lda->iterations, "LDA sweeps")->capture_default_str();
        cmd->add_option("--dict-size", lda->dict_size, "LDA dictionary cap")->capture_default_str();
        cmd->add_option("--sample-size", lda->sample_size, "LDA sample size")
            ->capture_default_str();
        cmd->callback([=, &exit_code] {
            run("sweep", *opts, *manifest, [&] {
                const uint64_t seed = resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["features"] = *kinds_arg;
                manifest->parameters["k_grid"] = *k_grid;
                manifest->parameters["classifier"] = *classifiers_arg;
                manifest->parameters["folds"] = std::to_string(*folds_k);
                manifest->parameters["jobs"] = std::to_string(*jobs);
                manifest->parameters["baseline"] = *no_baseline ? "0" : "1";
                record_train(*tcfg, *manifest);
                record_lda(*lda, *manifest);

                SweepSpec spec;
                spec.folds = *folds_k;
                spec.rng_seed = seed;
                spec.seeds = parse_seeds(opts->seeds_yes, opts->seeds_no);
                spec.lda = *lda;
                spec.train = *tcfg;
                spec.train.rng_seed = seed;
                spec.jobs = *jobs;
                spec.include_baseline = !*no_baseline;
                for (const auto& name : detail::split(*kinds_arg, ',')) {
                    if (name.empty()) continue;
                    if (name == "baseline") {
                        spec.include_baseline = true;
                        continue;
                    }
                    const auto kind = feature_kind_from_name(name);
                    if (!kind) throw InvalidConfig("unknown feature kind " + name);
                    spec.kinds.push_back(*kind);
                }
                if (!k_grid->empty()) {
                    std::vector<size_t> grid;
                    for (const auto& v : detail::split(*k_grid, ','))
                        if (!v.empty()) grid.push_back(std::stoull(v));
                    for (const auto kind : spec.kinds) spec.k_grid[kind] = grid;
                }
                for (const auto& name : detail::split(*classifiers_arg, ',')) {
                    if (name.empty()) continue;
                    const auto ckind = classifier_from_name(name);
                    if (!ckind) throw InvalidConfig("unknown classifier " + name);
                    spec.classifiers.push_back(*ckind);
                }

                const auto corpus = load_corpus(*opts, *manifest);
                const auto result = sweep(corpus, spec);

                const auto report_path = out_path(*opts, "report.csv");
                {
                    std::ofstream out(report_path);
                    if (!out) throw IoError("cannot write " + report_path);
                    write_sweep_report(result, out);
                }
                manifest->add_output(report_path);
                const auto summary_path = out_path(*opts, "summary.csv");
                {
                    std::ofstream out(summary_path);
                    if (!out) throw IoError("cannot write " + summary_path);
                    write_sweep_summary(result, out);
                }
                manifest->add_output(summary_path);
                for (const auto& row : result.rows) {
                    const auto cm_path = out_path(*opts, sidecar_name(row));
                    write_confusion(row.matrix, cm_path);
                    manifest->add_output(cm_path);
                }
                std::cout << "evaluated " << result.rows.size() << " cells -> " << report_path
                          << '\n';
            });
        });
    }

    // ------------------------------------------------------------- baseline
    {
        auto* cmd = app.add_subcommand("baseline", "seed-hashtag majority-vote classifier");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        add_common(cmd, *opts, Needs::CorpusAndLabels);
        cmd->callback([=, &exit_code] {
            run("baseline", *opts, *manifest, [&] {
                resolve_seed(*opts);
                record_common(*opts, *manifest);
                const auto seeds = parse_seeds(opts->seeds_yes, opts->seeds_no);
                const auto corpus = load_corpus(*opts, *manifest);
                const auto m = evaluate_baseline(corpus, seeds);
                const SweepRow row{"baseline", 0, "baseline", accuracy(m), m};
                const auto cm_path = out_path(*opts, sidecar_name(row));
                write_confusion(m, cm_path);
                manifest->add_output(cm_path);
                std::cout << "accuracy " << detail::format_accuracy(row.accuracy) << " ("
                          << m.trace() << "/" << m.total() << ")\n";
            });
        });
    }

    // --------------------------------------------------------------- report
    {
        auto* cmd = app.add_subcommand("report", "regenerate the min/max summary from a report");
        auto opts = std::make_shared<CommonOpts>();
        auto manifest = std::make_shared<RunManifest>();
        auto report_path = std::make_shared<std::string>("");
        add_common(cmd, *opts, Needs::Nothing);
        cmd->add_option("--report", *report_path, "sweep report.csv")->required();
        cmd->callback([=, &exit_code] {
            run("report", *opts, *manifest, [&] {
                resolve_seed(*opts);
                record_common(*opts, *manifest);
                manifest->parameters["report"] = *report_path;
                manifest->inputs.push_back(*report_path);
                std::ifstream in(*report_path);
                if (!in) throw IoError("cannot open report " + *report_path);
                const auto result = read_sweep_report(in, *report_path);
                const auto summary_path = out_path(*opts, "summary.csv");
                std::ofstream out(summary_path);
                if (!out) throw IoError("cannot write " + summary_path);
                write_sweep_summary(result, out);
                out.close();
                manifest->add_output(summary_path);
                std::cout << "wrote " << summary_path << '\n';
            });
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        std::cerr << app.help() << '\n';
        return 1;
    }
    return exit_code;
}

int main(int argc, char** argv) { return dispatch(argc, argv); }
