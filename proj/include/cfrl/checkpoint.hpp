#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cfrl/mlp.hpp"

namespace cfrl {

// Named networks plus a plain-text metadata sidecar (<path>.meta). The binary
// layout is versioned and documented in the README; parameters are stored as
// little-endian 64-bit floats in the flat MlpParams order.
struct Checkpoint {
    std::vector<std::pair<std::string, MlpParams>> networks;
    std::map<std::string, std::string> metadata;

    const MlpParams* find(const std::string& name) const;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cfrl
