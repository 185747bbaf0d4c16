#ifndef STANCETK_MANIFEST_HPP
#define STANCETK_MANIFEST_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stancetk/errors.hpp"
#include "stancetk/version.hpp"

namespace stancetk {

// FNV-1a over the file bytes; enough to tell identical artifacts apart.
inline std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot checksum " + path);
    uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

struct RunManifest {
    std::string command;
    std::string tool_version = kToolVersion;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, checksum
    uint64_t rng_seed = 0;
    double duration_ms = 0.0;
    int exit_code = 0;
    std::optional<std::pair<std::string, std::string>> error;  // name, message

    void add_output(const std::string& path) { outputs.emplace_back(path, fnv1a64_file(path)); }
};

inline void write_manifest(const RunManifest& run, const std::string& path) {
    nlohmann::json j;
    j["command"] = run.command;
    j["tool_version"] = run.tool_version;
    j["parameters"] = run.parameters;
    j["inputs"] = run.inputs;
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (const auto& [out_path, checksum] : run.outputs)
        outs.push_back({{"path", out_path}, {"checksum", checksum}});
    j["rng_seed"] = run.rng_seed;
    j["duration_ms"] = run.duration_ms;
    j["exit_code"] = run.exit_code;
    if (run.error)
        j["error"] = {{"name", run.error->first}, {"message", run.error->second}};
    else
        j["error"] = nullptr;

    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path);
    out << j.dump(2) << '\n';
}

} // namespace stancetk

#endif // STANCETK_MANIFEST_HPP
