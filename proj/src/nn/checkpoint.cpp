#include "ss2d/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ss2d/error.hpp"

namespace ss2d::nn {

namespace {

template <typename U>
void put_le(std::ostream& os, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) fail(ErrorCategory::Format, "checkpoint truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get_le<std::uint32_t>(is);
  if (n > (1u << 20)) fail(ErrorCategory::Format, "checkpoint string field too long");
  std::string s(n, '\0');
  if (!is.read(s.data(), n)) fail(ErrorCategory::Format, "checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& os, Network& net, const std::string& provenance) {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_le<std::uint32_t>(os, kCheckpointVersion);
  put_string(os, net.architecture().descriptor());
  put_string(os, provenance);
  const auto values = net.flat_values();
  put_le<std::uint64_t>(os, values.size());
  for (double v : values) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
}

Checkpoint read_checkpoint(std::istream& is) {
  char magic[sizeof(kCheckpointMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    fail(ErrorCategory::Format, "not a model checkpoint (bad magic)");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    fail(ErrorCategory::Format, "unsupported checkpoint version " + std::to_string(version));
  Checkpoint ck;
  ck.architecture = Architecture::parse(get_string(is));
  ck.provenance = get_string(is);
  const auto count = get_le<std::uint64_t>(is);
  if (count > (1ull << 32)) fail(ErrorCategory::Format, "checkpoint parameter count implausible");
  ck.values.resize(count);
  for (auto& v : ck.values) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return ck;
}

void save_checkpoint(const std::string& path, Network& net, const std::string& provenance) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCategory::Io, "cannot write checkpoint " + path);
  write_checkpoint(os, net, provenance);
  if (!os) fail(ErrorCategory::Io, "failed writing checkpoint " + path);
}

Network load_checkpoint(const std::string& path, std::string* provenance) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCategory::Io, "cannot open checkpoint " + path);
  Checkpoint ck = read_checkpoint(is);
  Network net(ck.architecture);
  net.set_flat_values(std::vector<Real>(ck.values.begin(), ck.values.end()));
  if (provenance) *provenance = ck.provenance;
  return net;
}

}  // namespace ss2d::nn
