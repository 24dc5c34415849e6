#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cfrl/ddpg.hpp"
#include "cfrl/eval.hpp"
#include "cfrl/synthetic.hpp"
#include "cfrl/trajectory.hpp"

namespace cfrl {

// Flat "section.key = value" configuration file. '#' starts a comment;
// whitespace around keys and values is ignored.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::filesystem::path& path);
    static KeyValueFile parse_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;  // throws ConfigError
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    void set(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& entries() const { return values_; }

    // sorted "key = value" lines; the canonical form used for hashing and
    // manifest echoes
    std::string canonical_text() const;

private:
    std::map<std::string, std::string> values_;
};

// Everything a run needs, resolved from the config file plus command-line
// overrides. The seed is mandatory.
struct RunConfig {
    std::string trajectory_path;
    std::string events_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;

    ColumnSchema columns;
    ParseLimits parse_limits;
    ExtractionConfig extract;
    double train_fraction = 0.7;
    TrainConfig train;        // carries reward spec and normalization scales
    ReportConfig report = ReportConfig::defaults();
    SyntheticConfig synthetic;

    static RunConfig from_kv(const KeyValueFile& kv);
    KeyValueFile to_kv() const;  // canonical echo of every resolved value
};

std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t fnv1a_file(const std::filesystem::path& path);

// Reproducibility record: canonical config echo, seed, input digests and the
// artifact version.
void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::string& command);

constexpr const char* kArtifactVersion = "cfrl 1.0.0";

}  // namespace cfrl
