#include "cfrl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "cfrl/errors.hpp"

namespace cfrl {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'F', 'R', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DataError("checkpoint file truncated");
    return value;
}

}  // namespace

const MlpParams* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, p] : networks) {
        if (n == name) return &p;
    }
    return nullptr;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());

    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint32_t>(ckpt.networks.size()));
    for (const auto& [name, p] : ckpt.networks) {
        write_pod(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod(out, static_cast<std::int32_t>(p.input_dim));
        write_pod(out, static_cast<std::int32_t>(p.hidden_dim));
        write_pod(out, static_cast<std::int32_t>(p.output_dim));
        write_pod(out, static_cast<std::uint32_t>(
                           p.activation == OutputActivation::tanh_scaled ? 1 : 0));
        write_pod(out, p.output_bound);
        write_pod(out, static_cast<std::uint64_t>(p.theta.size()));
        out.write(reinterpret_cast<const char*>(p.theta.data()),
                  static_cast<std::streamsize>(p.theta.size() * sizeof(double)));
    }
    if (!out) throw DataError("error writing checkpoint: " + path.string());
    out.close();

    std::ofstream meta(path.string() + ".meta");
    if (!meta) throw DataError("cannot open checkpoint sidecar for writing");
    for (const auto& [k, v] : ckpt.metadata) {
        meta << k << ": " << v << "\n";
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataError("not a checkpoint file: " + path.string());
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }

    Checkpoint ckpt;
    const auto count = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        MlpParams p;
        p.input_dim = read_pod<std::int32_t>(in);
        p.hidden_dim = read_pod<std::int32_t>(in);
        p.output_dim = read_pod<std::int32_t>(in);
        p.activation = read_pod<std::uint32_t>(in) == 1 ? OutputActivation::tanh_scaled
                                                        : OutputActivation::linear;
        p.output_bound = read_pod<double>(in);
        const auto n_params = read_pod<std::uint64_t>(in);
        if (n_params != p.parameter_count()) {
            throw DataError("checkpoint parameter count inconsistent with architecture");
        }
        p.theta.resize(n_params);
        in.read(reinterpret_cast<char*>(p.theta.data()),
                static_cast<std::streamsize>(n_params * sizeof(double)));
        if (!in) throw DataError("checkpoint file truncated");
        ckpt.networks.emplace_back(std::move(name), std::move(p));
    }

    const std::filesystem::path meta_path = path.string() + ".meta";
    if (std::filesystem::exists(meta_path)) {
        std::ifstream meta(meta_path);
        std::string line;
        while (std::getline(meta, line)) {
            const auto pos = line.find(": ");
            if (pos == std::string::npos) continue;
            ckpt.metadata[line.substr(0, pos)] = line.substr(pos + 2);
        }
    }
    return ckpt;
}

}  // namespace cfrl
