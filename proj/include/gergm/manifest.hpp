// Run manifests: every CLI command records its inputs, seed, and outputs so
// a run can be reproduced bit-for-bit.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gergm {

inline constexpr const char* kCodeVersion = "gergm-lab 0.1.0";

struct RunManifest {
    std::string command;
    std::string config_hash;  // hex digest of the canonical config text
    std::uint64_t seed = 0;
    std::string code_version = kCodeVersion;
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;

    std::string to_json() const;
};

// FNV-1a 64-bit hex digest.
std::string config_hash(const std::string& canonical_text);

}  // namespace gergm
