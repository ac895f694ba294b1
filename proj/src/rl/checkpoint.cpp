#include "tsc/rl/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tsc::rl {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic{'T', 'S', 'C', 'N', 'E', 'T', '0', '1'};
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream& out, T value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in)
{
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw CheckpointError("checkpoint truncated");
    }
    return value;
}

std::uint64_t get_count(std::istream& in)
{
    const auto n = get<std::uint64_t>(in);
    if (n > kMaxCount) {
        throw CheckpointError("checkpoint field count out of range");
    }
    return n;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Network& net, const std::string& label)
{
    const NetSpec& s = net.spec();
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, label.size());
    out.write(label.data(), static_cast<std::streamsize>(label.size()));
    put<std::uint64_t>(out, s.input_dim);
    put<std::uint64_t>(out, s.hidden.size());
    for (std::size_t w : s.hidden) {
        put<std::uint64_t>(out, w);
    }
    put<std::uint64_t>(out, s.n_actions);
    put<double>(out, s.support.v_min);
    put<double>(out, s.support.v_max);
    put<std::uint64_t>(out, s.support.n_atoms);
    put<std::uint8_t>(out, s.dueling ? 1 : 0);
    put<std::uint8_t>(out, s.noisy ? 1 : 0);
    put<double>(out, s.sigma_init);
    const Eigen::VectorXd& p = net.parameters();
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p.size()));
    out.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
    if (!out) {
        throw CheckpointError("failed to write checkpoint");
    }
}

void save_checkpoint(const std::filesystem::path& path, const Network& net, const std::string& label)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw CheckpointError("cannot open " + path.string() + " for writing");
    }
    write_checkpoint(out, net, label);
}

Checkpoint read_checkpoint(std::istream& in)
{
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw CheckpointError("not a network checkpoint (bad magic)");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint cp;
    cp.label.resize(get_count(in));
    if (!in.read(cp.label.data(), static_cast<std::streamsize>(cp.label.size()))) {
        throw CheckpointError("checkpoint truncated");
    }
    cp.spec.input_dim = get<std::uint64_t>(in);
    cp.spec.hidden.resize(get_count(in));
    for (std::size_t& w : cp.spec.hidden) {
        w = get<std::uint64_t>(in);
    }
    cp.spec.n_actions = get<std::uint64_t>(in);
    cp.spec.support.v_min = get<double>(in);
    cp.spec.support.v_max = get<double>(in);
    cp.spec.support.n_atoms = get<std::uint64_t>(in);
    cp.spec.dueling = get<std::uint8_t>(in) != 0;
    cp.spec.noisy = get<std::uint8_t>(in) != 0;
    cp.spec.sigma_init = get<double>(in);
    cp.parameters.resize(static_cast<Eigen::Index>(get_count(in)));
    if (!in.read(reinterpret_cast<char*>(cp.parameters.data()),
                 static_cast<std::streamsize>(cp.parameters.size() * sizeof(double)))) {
        throw CheckpointError("checkpoint truncated");
    }
    // Validates the spec and the parameter count.
    try {
        (void)cp.network();
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("inconsistent checkpoint: ") + e.what());
    }
    return cp;
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open checkpoint " + path.string());
    }
    return read_checkpoint(in);
}

}  // namespace tsc::rl
