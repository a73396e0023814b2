#pragma once

// Binary model checkpoint. Layout (all integers and doubles little-endian,
// doubles as raw IEEE-754 so a save/load round trip is bit-exact):
//
//   char[16]  magic "PAPRLAB-CKPT\0\0\0\0"
//   u32       format version (1)
//   u32 len + bytes   architecture descriptor, "key=value\n" lines
//   u64       seed
//   i32       epochs completed
//   u64       optimizer steps taken
//   u32       parameter count, then per parameter:
//               u32 len + bytes name, u32 rank, u64 dims[rank], u8 decay,
//               f64 value[n], f64 adam_m[n], f64 adam_v[n]
//   u32       buffer count, then per buffer:
//               u32 len + bytes name, u64 n, f64 value[n]

#include <cstdint>
#include <filesystem>
#include <string>

#include "paprlab/neural/model.hpp"

namespace paprlab::neural {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t seed = 0;
  int epoch = 0;
  std::uint64_t optimizer_steps = 0;

  bool operator==(const CheckpointMeta&) const = default;
};

struct LoadedCheckpoint {
  AutoencoderModel model;
  CheckpointMeta meta;
};

std::string describe_architecture(const Architecture& a);
Architecture parse_architecture(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, AutoencoderModel& model, const CheckpointMeta& meta);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace paprlab::neural
