#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksnd/model.hpp"

namespace ksnd::cli {

/// Little-endian layout: "KSND", u32 version, u32 n, u32 N, u32 M, f64 box
/// length, f64 time, per nucleus 3 f64 position, 3 f64 velocity, f64 mass,
/// u32 charge, then each orbital as (re, im) f64 pairs in storage order
/// (last index fastest), then a u64 FNV-1a checksum of all preceding bytes.
struct Checkpoint {
  double time = 0.0;
  NuclearState nuclei;
  OrbitalSet orbitals;
};

inline constexpr std::uint32_t checkpoint_version = 1;

std::vector<unsigned char> encode_checkpoint(const Checkpoint& cp);
/// Throws IoError on bad magic, version, size, truncation or checksum.
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes);

void write_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size);

}  // namespace ksnd::cli
