#pragma once
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tubal/tensor3.hpp"
#include "tubal/volume.hpp"

namespace tubal {

/// TVOL container: magic "TVOL", u32 version, u32 dims n1 n2 n3, f64 sample
/// interval, then n1*n2*n3 little-endian f32 samples in mode-1-fastest
/// order. All integers little-endian.
namespace volfile {
constexpr char kMagic[4] = {'T', 'V', 'O', 'L'};
constexpr std::uint32_t kVersion = 1;
}  // namespace volfile

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw format_error("volume read: truncated " + what);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, std::uint32_t(v));
  put_u32(os, std::uint32_t(v >> 32));
}

inline std::uint64_t get_u64(std::istream& is, const std::string& what) {
  const std::uint64_t lo = get_u32(is, what);
  const std::uint64_t hi = get_u32(is, what);
  return lo | (hi << 32);
}

}  // namespace detail

inline void write_volume(std::ostream& os, const Volume& v) {
  os.write(volfile::kMagic, 4);
  detail::put_u32(os, volfile::kVersion);
  detail::put_u32(os, std::uint32_t(v.n1));
  detail::put_u32(os, std::uint32_t(v.n2));
  detail::put_u32(os, std::uint32_t(v.n3));
  detail::put_u64(os, std::bit_cast<std::uint64_t>(v.sample_interval));
  for (double d : v.data) detail::put_u32(os, std::bit_cast<std::uint32_t>(float(d)));
  if (!os) throw io_error("volume write: stream failure");
}

inline Volume read_volume(std::istream& is, const std::string& name = "<stream>") {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, volfile::kMagic, 4) != 0)
    throw format_error("volume read: " + name + ": bad magic bytes, not a TVOL file");
  const std::uint32_t version = detail::get_u32(is, "version");
  if (version != volfile::kVersion)
    throw format_error("volume read: " + name + ": unsupported version " +
                       std::to_string(version));
  const std::uint32_t n1 = detail::get_u32(is, "dims");
  const std::uint32_t n2 = detail::get_u32(is, "dims");
  const std::uint32_t n3 = detail::get_u32(is, "dims");
  if (n1 == 0 || n2 == 0 || n3 == 0)
    throw format_error("volume read: " + name + ": zero dimension");
  Volume v(static_cast<Index>(n1), static_cast<Index>(n2), static_cast<Index>(n3));
  v.sample_interval = std::bit_cast<double>(detail::get_u64(is, "sample interval"));
  if (!std::isfinite(v.sample_interval))
    throw format_error("volume read: " + name + ": non-finite sample interval");
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    const float f = std::bit_cast<float>(detail::get_u32(is, "payload"));
    if (!std::isfinite(f))
      throw format_error("volume read: " + name + ": non-finite sample in payload");
    v.data[i] = double(f);
  }
  char extra;
  if (is.read(&extra, 1))
    throw format_error("volume read: " + name + ": trailing bytes after payload");
  return v;
}

/// Atomic file write: stream into a sibling temp file, rename into place.
/// A failed write leaves no partial output behind.
template <typename WriteFn>
inline void write_file_atomic(const std::string& path, WriteFn&& fn) {
  const std::string tmp = path + ".tmp~";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open '" + tmp + "' for writing");
    try {
      fn(os);
      os.flush();
      if (!os) throw io_error("write to '" + tmp + "' failed");
    } catch (...) {
      os.close();
      std::remove(tmp.c_str());
      throw;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw io_error("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

inline void save_volume(const std::string& path, const Volume& v) {
  write_file_atomic(path, [&](std::ostream& os) { write_volume(os, v); });
}

inline Volume load_volume(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open '" + path + "' for reading");
  return read_volume(is, path);
}

/// Tensors ride in the same container with dims (m, r, k); the storage
/// orders coincide.
inline void save_tensor(const std::string& path, const Tensor3& t, double sample_interval = 0) {
  Volume v(t.m, t.n, t.k, sample_interval);
  v.data = t.data;
  save_volume(path, v);
}

inline Tensor3 load_tensor(const std::string& path) {
  const Volume v = load_volume(path);
  Tensor3 t(v.n1, v.n2, v.n3);
  t.data = v.data;
  return t;
}

}  // namespace tubal
