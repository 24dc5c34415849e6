#include "cfrl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cfrl/errors.hpp"

namespace cfrl {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        kv.values_[key] = value;
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueFile::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key,
                                     const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
        throw ConfigError("config key " + key + ": not a number: " + it->second);
    }
    return v;
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    const long long v = std::strtoll(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0') {
        throw ConfigError("config key " + key + ": not an integer: " + it->second);
    }
    return v;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string KeyValueFile::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

RunConfig RunConfig::from_kv(const KeyValueFile& kv) {
    RunConfig c;
    c.trajectory_path = kv.get_string("data.trajectory", "");
    c.events_path = kv.get_string("data.events", "");
    c.out_dir = kv.get_string("run.out_dir", "out");
    if (kv.has("run.seed")) {
        c.seed = static_cast<std::uint64_t>(kv.get_int("run.seed", 0));
        c.seed_set = true;
    }

    c.columns.vehicle_id = static_cast<int>(kv.get_int("columns.vehicle_id", -1));
    c.columns.time = static_cast<int>(kv.get_int("columns.time", -1));
    c.columns.position = static_cast<int>(kv.get_int("columns.position", -1));
    c.columns.speed = static_cast<int>(kv.get_int("columns.speed", -1));
    c.columns.acceleration = static_cast<int>(kv.get_int("columns.acceleration", -1));
    c.columns.lane_id = static_cast<int>(kv.get_int("columns.lane_id", -1));
    c.columns.leader_id = static_cast<int>(kv.get_int("columns.leader_id", -1));
    c.columns.vehicle_length = static_cast<int>(kv.get_int("columns.vehicle_length", -1));

    c.parse_limits.max_abs_acceleration = kv.get_double("parse.max_abs_acceleration", 8.0);
    c.extract.min_duration = kv.get_double("extract.min_duration", 15.0);
    c.extract.min_gap = kv.get_double("extract.min_gap", 0.0);
    c.train_fraction = kv.get_double("split.train_fraction", 0.7);

    RewardSpec& r = c.train.reward;
    r.weights.ttc = kv.get_double("reward.w_ttc", 1.0);
    r.weights.headway = kv.get_double("reward.w_headway", 1.0);
    r.weights.jerk = kv.get_double("reward.w_jerk", 1.0);
    r.ttc_safety_limit = kv.get_double("reward.ttc_safety_limit", 7.0);
    r.ttc_floor = kv.get_double("reward.ttc_floor", 0.1);
    r.headway_fit.mu = kv.get_double("reward.headway_mu", 0.4226);
    r.headway_fit.sigma = kv.get_double("reward.headway_sigma", 0.4365);

    c.train.episodes = static_cast<int>(kv.get_int("train.episodes", 60));
    c.train.minibatch = static_cast<int>(kv.get_int("train.minibatch", 32));
    c.train.gamma = kv.get_double("train.gamma", 0.99);
    c.train.tau = kv.get_double("train.tau", 0.001);
    c.train.actor_lr = kv.get_double("train.actor_lr", 0.001);
    c.train.critic_lr = kv.get_double("train.critic_lr", 0.001);
    c.train.buffer_capacity =
        static_cast<std::size_t>(kv.get_int("train.buffer_capacity", 7000));
    c.train.hidden_dim = static_cast<int>(kv.get_int("train.hidden_dim", 30));
    c.train.action_bound = kv.get_double("env.action_bound", 3.0);
    c.train.noise_theta = kv.get_double("noise.theta", 0.15);
    c.train.noise_sigma = kv.get_double("noise.sigma", 0.2);
    c.train.norm.speed = kv.get_double("norm.speed", 30.0);
    c.train.norm.relative_speed = kv.get_double("norm.relative_speed", 10.0);
    c.train.norm.gap = kv.get_double("norm.gap", 100.0);
    c.train.dt = kv.get_double("env.dt", kSampleInterval);
    c.extract.dt = c.train.dt;

    c.report.headway_bin = kv.get_double("report.headway_bin", 0.25);
    c.report.headway_lo = kv.get_double("report.headway_lo", 0.0);
    c.report.headway_hi = kv.get_double("report.headway_hi", 6.0);
    c.report.jerk_bin = kv.get_double("report.jerk_bin", 0.5);
    c.report.jerk_lo = kv.get_double("report.jerk_lo", -10.0);
    c.report.jerk_hi = kv.get_double("report.jerk_hi", 10.0);
    c.report.example_events = static_cast<int>(kv.get_int("report.example_events", 3));
    c.report.warmup_seconds = kv.get_double("report.warmup_seconds", 5.0);

    c.synthetic.min_samples = static_cast<int>(kv.get_int("synthetic.min_samples", 152));
    c.synthetic.max_samples = static_cast<int>(kv.get_int("synthetic.max_samples", 400));
    c.synthetic.headway_mu = kv.get_double("synthetic.headway_mu", 0.4226);
    c.synthetic.headway_sigma = kv.get_double("synthetic.headway_sigma", 0.4365);
    c.synthetic.dt = c.train.dt;

    c.train.seed = c.seed;
    return c;
}

KeyValueFile RunConfig::to_kv() const {
    KeyValueFile kv;
    kv.set("data.trajectory", trajectory_path);
    kv.set("data.events", events_path);
    kv.set("run.out_dir", out_dir);
    kv.set("run.seed", std::to_string(seed));

    kv.set("columns.vehicle_id", std::to_string(columns.vehicle_id));
    kv.set("columns.time", std::to_string(columns.time));
    kv.set("columns.position", std::to_string(columns.position));
    kv.set("columns.speed", std::to_string(columns.speed));
    kv.set("columns.acceleration", std::to_string(columns.acceleration));
    kv.set("columns.lane_id", std::to_string(columns.lane_id));
    kv.set("columns.leader_id", std::to_string(columns.leader_id));
    kv.set("columns.vehicle_length", std::to_string(columns.vehicle_length));

    kv.set("parse.max_abs_acceleration", format_double(parse_limits.max_abs_acceleration));
    kv.set("extract.min_duration", format_double(extract.min_duration));
    kv.set("extract.min_gap", format_double(extract.min_gap));
    kv.set("split.train_fraction", format_double(train_fraction));

    kv.set("reward.w_ttc", format_double(train.reward.weights.ttc));
    kv.set("reward.w_headway", format_double(train.reward.weights.headway));
    kv.set("reward.w_jerk", format_double(train.reward.weights.jerk));
    kv.set("reward.ttc_safety_limit", format_double(train.reward.ttc_safety_limit));
    kv.set("reward.ttc_floor", format_double(train.reward.ttc_floor));
    kv.set("reward.headway_mu", format_double(train.reward.headway_fit.mu));
    kv.set("reward.headway_sigma", format_double(train.reward.headway_fit.sigma));

    kv.set("train.episodes", std::to_string(train.episodes));
    kv.set("train.minibatch", std::to_string(train.minibatch));
    kv.set("train.gamma", format_double(train.gamma));
    kv.set("train.tau", format_double(train.tau));
    kv.set("train.actor_lr", format_double(train.actor_lr));
    kv.set("train.critic_lr", format_double(train.critic_lr));
    kv.set("train.buffer_capacity", std::to_string(train.buffer_capacity));
    kv.set("train.hidden_dim", std::to_string(train.hidden_dim));
    kv.set("env.action_bound", format_double(train.action_bound));
    kv.set("env.dt", format_double(train.dt));
    kv.set("noise.theta", format_double(train.noise_theta));
    kv.set("noise.sigma", format_double(train.noise_sigma));
    kv.set("norm.speed", format_double(train.norm.speed));
    kv.set("norm.relative_speed", format_double(train.norm.relative_speed));
    kv.set("norm.gap", format_double(train.norm.gap));

    kv.set("report.headway_bin", format_double(report.headway_bin));
    kv.set("report.headway_lo", format_double(report.headway_lo));
    kv.set("report.headway_hi", format_double(report.headway_hi));
    kv.set("report.jerk_bin", format_double(report.jerk_bin));
    kv.set("report.jerk_lo", format_double(report.jerk_lo));
    kv.set("report.jerk_hi", format_double(report.jerk_hi));
    kv.set("report.example_events", std::to_string(report.example_events));
    kv.set("report.warmup_seconds", format_double(report.warmup_seconds));

    kv.set("synthetic.min_samples", std::to_string(synthetic.min_samples));
    kv.set("synthetic.max_samples", std::to_string(synthetic.max_samples));
    kv.set("synthetic.headway_mu", format_double(synthetic.headway_mu));
    kv.set("synthetic.headway_sigma", format_double(synthetic.headway_sigma));
    return kv;
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path.string());
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto got = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return hash;
}

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::string& command) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path.string());
    out << "artifact: " << kArtifactVersion << "\n";
    out << "command: " << command << "\n";
    out << "seed: " << config.seed << "\n";
    const std::string canonical = config.to_kv().canonical_text();
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical.data(), canonical.size())));
    out << "config_hash: " << hash_buf << "\n";
    for (const auto& [name, digest] : inputs) {
        out << "input " << name << ": " << digest << "\n";
    }
    out << "config:\n";
    std::istringstream lines(canonical);
    std::string line;
    while (std::getline(lines, line)) out << "  " << line << "\n";
}

}  // namespace cfrl
