#pragma once

#include <iosfwd>
#include <string>

#include "ss2d/nn/network.hpp"

namespace ss2d::nn {

/// Layout (all integers little-endian):
///   magic "SS2DNNCK" | u32 version | u32 len + architecture descriptor |
///   u32 len + provenance text | u64 count | count x f64 parameters in declaration order
inline constexpr char kCheckpointMagic[8] = {'S', 'S', '2', 'D', 'N', 'N', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Architecture architecture;
  std::string provenance;
  std::vector<double> values;
};

void write_checkpoint(std::ostream& os, Network& net, const std::string& provenance);
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::string& path, Network& net, const std::string& provenance);
/// Rebuilds the network described by the file and loads its parameters.
Network load_checkpoint(const std::string& path, std::string* provenance = nullptr);

}  // namespace ss2d::nn
