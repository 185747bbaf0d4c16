#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#ifndef STANCETK_BIN
#define STANCETK_BIN "stancetk"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "cli_output.log";
    const std::string command =
        std::string(STANCETK_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream content;
    content << in.rdbuf();
    result.output = content.str();
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("stancetk_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("synth writes the corpus files and exits 0") {
    const fs::path dir = fresh_dir("synth");
    const auto result = run_cli(
        "synth --users 50 --seed 42 --tweets-min 2 --tweets-max 4 --out " + (dir / "data").string(),
        dir);
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(dir / "data" / "tweets.jsonl"));
    CHECK(fs::exists(dir / "data" / "labels.tsv"));
    CHECK(fs::exists(dir / "data" / "synth_manifest.json"));
}

TEST_CASE("missing required flags exit 1 with usage text") {
    const fs::path dir = fresh_dir("usage");
    const auto result = run_cli("cv --features hashtag --k 50", dir);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("--corpus") != std::string::npos);
}

TEST_CASE("contract errors exit 2 and name the error") {
    const fs::path dir = fresh_dir("contract");
    // a corpus with no seed hashtags at all
    const fs::path corpus = dir / "empty.jsonl";
    const fs::path labels = dir / "labels.tsv";
    {
        std::ofstream out(corpus);
        out << R"({"id":"1","user_id":"u1","timestamp":"2017-04-01T00:00:00Z","text":"sıradan metin","is_retweet":false})"
            << '\n';
        std::ofstream lab(labels);
        lab << "u1\tyes\n";
    }
    const auto result = run_cli("discover --corpus " + corpus.string() + " --labels " +
                                    labels.string() + " --features hashtag --k 5 --out " +
                                    (dir / "out").string(),
                                dir);
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("NoSeedOccurrences") != std::string::npos);

    // the failed run still writes a manifest with the error recorded
    const fs::path manifest_path = dir / "out" / "discover_manifest.json";
    REQUIRE(fs::exists(manifest_path));
    std::ifstream in(manifest_path);
    const auto manifest = nlohmann::json::parse(in);
    CHECK(manifest.at("exit_code").get<int>() == 2);
    CHECK(manifest.at("error").at("name").get<std::string>() == "NoSeedOccurrences");
}

TEST_CASE("the pipeline chains through files") {
    const fs::path dir = fresh_dir("pipeline");
    const std::string data = (dir / "data").string();
    REQUIRE(run_cli("synth --users 60 --seed 7 --tweets-min 2 --tweets-max 5 "
                    "--injection-rate 0.2 --out " + data,
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("ingest --corpus " + data + "/tweets.jsonl --labels " + data +
                        "/labels.tsv --out " + (dir / "ingested").string(),
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("discover --corpus " + data + "/tweets.jsonl --labels " + data +
                        "/labels.tsv --features bow --k 20 --out " + (dir / "disc").string(),
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("featurize --corpus " + data + "/tweets.jsonl --labels " + data +
                        "/labels.tsv --space " + (dir / "disc" / "space_bow_20.tsv").string() +
                        " --out " + (dir / "feat").string(),
                    dir)
                .exit_code == 0);
    REQUIRE(run_cli("train --matrix " + (dir / "feat" / "matrix.tsv").string() +
                        " --classifier svm --seed 3 --out " + (dir / "model").string(),
                    dir)
                .exit_code == 0);
    CHECK(fs::exists(dir / "model" / "svm_model.txt"));
    const auto cv = run_cli("cv --corpus " + data + "/tweets.jsonl --labels " + data +
                                "/labels.tsv --features bow --k 20 --classifier svm --folds 5 "
                                "--seed 3 --out " + (dir / "cv").string(),
                            dir);
    CHECK(cv.exit_code == 0);
    CHECK(fs::exists(dir / "cv" / "bow_20_svm.cm"));
    const auto baseline = run_cli("baseline --corpus " + data + "/tweets.jsonl --labels " + data +
                                      "/labels.tsv --out " + (dir / "base").string(),
                                  dir);
    CHECK(baseline.exit_code == 0);
    CHECK(fs::exists(dir / "base" / "baseline_0_baseline.cm"));
}

TEST_CASE("sample filters by activity and subsets labels") {
    const fs::path dir = fresh_dir("sample");
    const std::string data = (dir / "data").string();
    REQUIRE(run_cli("synth --users 40 --seed 9 --tweets-min 4 --tweets-max 8 --out " + data, dir)
                .exit_code == 0);
    const auto result = run_cli("sample --corpus " + data + "/tweets.jsonl --labels " + data +
                                    "/labels.tsv --min-retweets 1 --n 10 --strata 2 --seed 4 "
                                    "--out " + (dir / "sampled").string(),
                                dir);
    CHECK(result.exit_code == 0);
    REQUIRE(fs::exists(dir / "sampled" / "users.txt"));
    std::ifstream users(dir / "sampled" / "users.txt");
    size_t count = 0;
    std::string line;
    while (std::getline(users, line))
        if (!line.empty()) ++count;
    CHECK(count == 10);
    CHECK(fs::exists(dir / "sampled" / "sampled_labels.tsv"));
}

TEST_CASE("report regenerates the summary from a report csv") {
    const fs::path dir = fresh_dir("report");
    const fs::path report = dir / "report.csv";
    {
        std::ofstream out(report);
        out << "feature_kind,k,classifier,accuracy\n";
        out << "hashtag,5,svm,0.700000\n";
        out << "hashtag,10,svm,0.800000\n";
        out << "hashtag,25,svm,0.750000\n";
    }
    const auto result = run_cli(
        "report --report " + report.string() + " --out " + (dir / "out").string(), dir);
    CHECK(result.exit_code == 0);
    std::ifstream in(dir / "out" / "summary.csv");
    std::ostringstream content;
    content << in.rdbuf();
    CHECK(content.str() ==
          "feature_kind,classifier,min_accuracy,min_k,max_accuracy,max_k\n"
          "hashtag,svm,0.700000,5,0.800000,10\n");
}
