#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sicmag {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_file(const std::string& path);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

// manifest.json is written last: its presence implies the run completed and
// every listed digest verifies.
void write_manifest(const std::string& dir, const nlohmann::json& config_snapshot,
                    double wall_seconds, const std::vector<std::string>& files);

// Recompute digests of the files listed in dir/manifest.json; true when all
// match.
bool verify_manifest(const std::string& dir);

}  // namespace sicmag
