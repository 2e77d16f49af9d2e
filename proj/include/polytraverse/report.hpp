// Machine-readable run reports ("report_v1"): stable field order, network
// fingerprinting, and JSON helpers shared by the CLI.
#pragma once

#include <json.hpp>
#include <string>

#include "polytraverse/traversal.hpp"

namespace polytraverse {

inline constexpr const char* kArtifactName = "polytraverse";
inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report_v1";

// 64-bit FNV-1a over the file bytes, rendered as "fnv1a64:<hex>".
std::string fingerprint_file(const std::string& path);

nlohmann::ordered_json stats_to_json(const TraversalStats& stats);
nlohmann::ordered_json vector_to_json(const DenseVector& v);

// Report skeleton with command echo, network fingerprint and config; the
// caller fills "result".
nlohmann::ordered_json make_report(const std::string& command,
                                   const std::string& network_path,
                                   const nlohmann::ordered_json& config);

// Codes sorted by their string form, for byte-stable reports.
std::vector<std::string> sorted_code_strings(const CodeSet& codes);

}  // namespace polytraverse
