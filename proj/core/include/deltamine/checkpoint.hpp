#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace deltamine::nn {

// Versioned binary container for named parameter tensors.
//
//   magic "DMN1" | u8 byte-order (1 = little endian) | u32 version
//   u32 entry count
//   shape table: per entry u32 name length, name bytes, u32 ndim, u64 dims...
//   blobs: per entry, f64 values in table order
//
// All integers and floats are little endian on disk regardless of host.
struct CheckpointEntry {
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

using Checkpoint = std::map<std::string, CheckpointEntry>;

inline constexpr char kCheckpointMagic[4] = {'D', 'M', 'N', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& entries, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Throws when `name` is missing or its stored shape differs from `expected`.
const CheckpointEntry& require_entry(const Checkpoint& cp, const std::string& name,
                                     const std::vector<std::size_t>& expected);

}  // namespace deltamine::nn
