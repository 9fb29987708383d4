#include "gergm/manifest.hpp"

#include "json.hpp"

namespace gergm {

std::string config_hash(const std::string& canonical_text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["code_version"] = code_version;
    j["outputs"] = outputs;
    j["wall_time_s"] = wall_time_s;
    return j.dump(2);
}

}  // namespace gergm
