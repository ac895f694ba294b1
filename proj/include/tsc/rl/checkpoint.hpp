#pragma once

#include "tsc/rl/network.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace tsc::rl {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary checkpoint, little-endian:
//   char[8]  magic "TSCNET01"
//   u32      format version (1)
//   u64 len, bytes   free-form label (e.g. agent variant)
//   u64      input_dim
//   u64 count, u64[count]  hidden widths
//   u64      n_actions
//   f64 f64 u64      v_min, v_max, n_atoms
//   u8 u8 f64        dueling, noisy, sigma_init
//   u64 count, f64[count]  flat parameters (layout of Network)
struct Checkpoint {
    std::string label;
    NetSpec spec;
    Eigen::VectorXd parameters;

    Network network() const { return Network(spec, parameters); }
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Network& net, const std::string& label);
void save_checkpoint(const std::filesystem::path& path, const Network& net, const std::string& label);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tsc::rl
