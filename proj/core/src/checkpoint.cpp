#include "deltamine/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace deltamine::nn {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint: truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("checkpoint: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void save_checkpoint(const Checkpoint& entries, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kCheckpointMagic, 4);
  os.put(static_cast<char>(1));  // little endian
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, entry] : entries) {
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<std::uint32_t>(entry.shape.size()));
    std::size_t expected = 1;
    for (auto d : entry.shape) {
      put_u64(os, d);
      expected *= d;
    }
    if (expected != entry.data.size()) {
      throw std::invalid_argument("checkpoint: entry '" + name + "' data does not match shape");
    }
  }
  for (const auto& [name, entry] : entries) {
    (void)name;
    for (double d : entry.data) put_f64(os, d);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  const int byte_order = is.get();
  if (byte_order != 1) throw std::runtime_error("checkpoint: unsupported byte order");
  const std::uint32_t version = get_u32(is);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32(is);

  std::vector<std::string> order;
  Checkpoint entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw std::runtime_error("checkpoint: truncated");
    const std::uint32_t ndim = get_u32(is);
    CheckpointEntry entry;
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      const std::uint64_t dim = get_u64(is);
      entry.shape.push_back(static_cast<std::size_t>(dim));
      total *= static_cast<std::size_t>(dim);
    }
    entry.data.resize(total);
    order.push_back(name);
    entries.emplace(std::move(name), std::move(entry));
  }
  for (const auto& name : order) {
    auto& entry = entries.at(name);
    for (auto& d : entry.data) d = get_f64(is);
  }
  return entries;
}

const CheckpointEntry& require_entry(const Checkpoint& cp, const std::string& name,
                                     const std::vector<std::size_t>& expected) {
  auto it = cp.find(name);
  if (it == cp.end()) throw std::runtime_error("checkpoint: missing entry '" + name + "'");
  if (it->second.shape != expected) {
    throw std::runtime_error("checkpoint: shape mismatch for entry '" + name + "'");
  }
  return it->second;
}

}  // namespace deltamine::nn
