#include "sicmag/manifest.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sicmag {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256_file: cannot open " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256_file: digest init failed");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void write_manifest(const std::string& dir, const json& config_snapshot, double wall_seconds,
                    const std::vector<std::string>& files) {
    json doc;
    doc["tool"] = "sicmag";
    doc["version"] = kToolVersion;
    doc["wall_seconds"] = wall_seconds;
    doc["config"] = config_snapshot;
    doc["outputs"] = json::array();
    for (const std::string& rel : files) {
        const std::string full = dir + "/" + rel;
        doc["outputs"].push_back({{"path", rel},
                                  {"sha256", sha256_file(full)},
                                  {"bytes", fs::file_size(full)}});
    }
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + dir + "/manifest.json");
    out << doc.dump(2) << "\n";
}

bool verify_manifest(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) return false;
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error&) {
        return false;
    }
    for (const auto& entry : doc["outputs"]) {
        const std::string rel = entry["path"].get<std::string>();
        const std::string expect = entry["sha256"].get<std::string>();
        try {
            if (sha256_file(dir + "/" + rel) != expect) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return true;
}

}  // namespace sicmag
