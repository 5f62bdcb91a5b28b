#pragma once

#include <bit>
#include <climits>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lanmsff/data/schema.hpp"

namespace lanmsff::data {

// Sample cache layout, little-endian:
//   "LNMC"  u32 version  u32 channels  u32 size  u64 count
//   per sample: u32 id-length, id, i32 label, i32 pose (INT32_MIN = unknown),
//               u8 split, channels·size·size f32 pixels

inline constexpr char kCacheMagic[4] = {'L', 'N', 'M', 'C'};
inline constexpr std::uint32_t kCacheVersion = 1;

namespace detail {

template <typename T>
void cache_put(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <typename T>
T cache_get(const std::vector<unsigned char>& in, std::size_t& pos) {
  require(pos + sizeof(T) <= in.size(), ErrorKind::Truncated, "sample cache truncated at byte ", pos);
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

inline std::vector<unsigned char> encode_cache(const Dataset& d) {
  const std::size_t channels = d.empty() ? 1 : d[0].channels, size = d.empty() ? 64 : d[0].size;
  std::vector<unsigned char> out(std::begin(kCacheMagic), std::end(kCacheMagic));
  detail::cache_put<std::uint32_t>(out, kCacheVersion);
  detail::cache_put<std::uint32_t>(out, static_cast<std::uint32_t>(channels));
  detail::cache_put<std::uint32_t>(out, static_cast<std::uint32_t>(size));
  detail::cache_put<std::uint64_t>(out, d.size());
  for (const auto& s : d) {
    require(s.channels == channels && s.size == size && s.image.size() == channels * size * size,
            ErrorKind::ShapeMismatch, "sample ", s.source_id, " geometry differs from the cache geometry");
    detail::cache_put<std::uint32_t>(out, static_cast<std::uint32_t>(s.source_id.size()));
    out.insert(out.end(), s.source_id.begin(), s.source_id.end());
    detail::cache_put<std::int32_t>(out, s.label);
    detail::cache_put<std::int32_t>(out, s.pose ? static_cast<std::int32_t>(*s.pose) : INT32_MIN);
    out.push_back(static_cast<unsigned char>(s.split));
    for (real v : s.image) detail::cache_put<float>(out, static_cast<float>(v));
  }
  return out;
}

inline Dataset decode_cache(const std::vector<unsigned char>& in) {
  require(in.size() >= 4 && std::equal(in.begin(), in.begin() + 4, std::begin(kCacheMagic)), ErrorKind::BadMagic,
          "not a sample cache (expected magic LNMC)");
  std::size_t pos = 4;
  const auto version = detail::cache_get<std::uint32_t>(in, pos);
  require(version == kCacheVersion, ErrorKind::Parse, "unsupported sample cache version ", version);
  const std::size_t channels = detail::cache_get<std::uint32_t>(in, pos);
  const std::size_t size = detail::cache_get<std::uint32_t>(in, pos);
  const auto count = detail::cache_get<std::uint64_t>(in, pos);
  Dataset d;
  for (std::uint64_t i = 0; i < count; ++i) {
    Sample s;
    s.channels = channels;
    s.size = size;
    const auto len = detail::cache_get<std::uint32_t>(in, pos);
    require(pos + len <= in.size(), ErrorKind::Truncated, "sample cache truncated inside an id");
    s.source_id.assign(reinterpret_cast<const char*>(in.data() + pos), len);
    pos += len;
    s.label = detail::cache_get<std::int32_t>(in, pos);
    const auto pose = detail::cache_get<std::int32_t>(in, pos);
    if (pose != INT32_MIN) s.pose = pose;
    const auto split = detail::cache_get<std::uint8_t>(in, pos);
    require(split <= 2, ErrorKind::Parse, "bad split tag ", int(split), " in sample cache");
    s.split = static_cast<Split>(split);
    s.image.resize(channels * size * size);
    for (auto& v : s.image) v = static_cast<real>(detail::cache_get<float>(in, pos));
    d.push_back(std::move(s));
  }
  require(pos == in.size(), ErrorKind::Parse, "trailing bytes after the last cached sample");
  return d;
}

inline void save_cache(const Dataset& d, const std::string& path) {
  const auto bytes = encode_cache(d);
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open ", path, " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline Dataset load_cache(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open sample cache ", path);
  return decode_cache({std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()});
}

}  // namespace lanmsff::data
