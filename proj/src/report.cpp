#include "polytraverse/report.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace polytraverse {

std::string fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file for fingerprinting: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[32];
    std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return hex;
}

nlohmann::ordered_json stats_to_json(const TraversalStats& stats) {
    nlohmann::ordered_json j;
    j["polytopes_visited"] = stats.polytopes_visited;
    j["lp_calls"] = stats.lp_calls;
    j["codes_checked"] = stats.codes_checked;
    j["wall_time_seconds"] = stats.wall_time_seconds;
    j["truncated"] = stats.truncated;
    j["stopped_early"] = stats.stopped_early;
    j["workers"] = stats.workers;
    return j;
}

nlohmann::ordered_json vector_to_json(const DenseVector& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

nlohmann::ordered_json make_report(const std::string& command,
                                   const std::string& network_path,
                                   const nlohmann::ordered_json& config) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchema;
    j["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
    j["command"] = command;
    j["network"] = {{"path", network_path}, {"fingerprint", fingerprint_file(network_path)}};
    j["config"] = config;
    j["result"] = nullptr;
    return j;
}

std::vector<std::string> sorted_code_strings(const CodeSet& codes) {
    std::vector<std::string> out;
    out.reserve(codes.size());
    for (const auto& c : codes) out.push_back(c.to_string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace polytraverse
