#pragma once

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lanmsff/model/lanmsff.hpp"

namespace lanmsff::model {

// Weight file layout, all integers and floats little-endian:
//   "LNMF"  u32 version  u64 config-hash  u32 element-type  u64 file-length  u32 record-count
//   records: u32 name-length, name bytes, u32 rank, rank × u64 extents, numel × element
//   u64 FNV-1a checksum of every preceding byte

enum class ElementType : std::uint32_t { F32 = 1, F64 = 2 };

inline constexpr char kWeightMagic[4] = {'L', 'N', 'M', 'F'};
inline constexpr std::uint32_t kWeightVersion = 1;

namespace detail {

template <typename T>
void put_le(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    require(pos_ + sizeof(T) <= bytes_.size(), ErrorKind::Truncated, "weight file ends at byte ", bytes_.size(),
            " while reading offset ", pos_);
    unsigned char b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }

  std::string get_string(std::size_t n) {
    require(pos_ + n <= bytes_.size(), ErrorKind::Truncated, "weight file ends inside a parameter name");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

inline constexpr std::size_t kLengthOffset = 4 + 4 + 8 + 4;

}  // namespace detail

inline std::vector<unsigned char> encode_weights(const LanmsffModel& m, ElementType type = ElementType::F64) {
  std::vector<unsigned char> out(std::begin(kWeightMagic), std::end(kWeightMagic));
  detail::put_le<std::uint32_t>(out, kWeightVersion);
  detail::put_le<std::uint64_t>(out, m.config().architecture_hash());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(type));
  detail::put_le<std::uint64_t>(out, 0);  // patched below
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.parameters().size()));
  for (const auto& p : m.parameters()) {
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rank()));
    for (auto e : p.value.shape()) detail::put_le<std::uint64_t>(out, e);
    for (real v : p.value.data()) {
      if (type == ElementType::F32)
        detail::put_le<float>(out, static_cast<float>(v));
      else
        detail::put_le<double>(out, static_cast<double>(v));
    }
  }
  std::vector<unsigned char> len;
  detail::put_le<std::uint64_t>(len, out.size() + 8);
  std::copy(len.begin(), len.end(), out.begin() + detail::kLengthOffset);
  detail::put_le<std::uint64_t>(out, fnv1a(out));
  return out;
}

/// Builds a model for `config` and fills it from an encoded weight file.
inline LanmsffModel decode_weights(std::span<const unsigned char> bytes, const LanmsffConfig& config) {
  require(bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, std::begin(kWeightMagic)),
          ErrorKind::BadMagic, "not a weight file (expected magic LNMF)");
  detail::Reader header(bytes);
  header.get_string(4);
  const auto version = header.get<std::uint32_t>();
  require(version == kWeightVersion, ErrorKind::Parse, "unsupported weight file version ", version);
  const auto hash = header.get<std::uint64_t>();
  const auto type = static_cast<ElementType>(header.get<std::uint32_t>());
  const auto length = header.get<std::uint64_t>();
  require(bytes.size() >= length, ErrorKind::Truncated, "weight file declares ", length, " bytes but only ",
          bytes.size(), " are present");
  require(length >= header.position() + 4 + 8, ErrorKind::Truncated, "weight file length field too small");
  const auto body = bytes.first(length - 8);
  detail::Reader tail(bytes.subspan(length - 8, 8));
  const auto stored_sum = tail.get<std::uint64_t>();
  require(fnv1a(body) == stored_sum, ErrorKind::ChecksumMismatch, "weight file checksum does not match its contents");
  require(hash == config.architecture_hash(), ErrorKind::ConfigHashMismatch,
          "weight file was written for a different architecture (", config.architecture_key(), " expected)");
  require(type == ElementType::F32 || type == ElementType::F64, ErrorKind::Parse, "unknown element type ",
          static_cast<std::uint32_t>(type));

  LanmsffModel m = LanmsffModel::build(config);
  detail::Reader r(body);
  r.get_string(header.position());
  const auto count = r.get<std::uint32_t>();
  require(count == m.parameters().size(), ErrorKind::ConfigHashMismatch, "weight file holds ", count,
          " parameters, architecture has ", m.parameters().size());
  for (auto& p : m.parameters()) {
    const auto name = r.get_string(r.get<std::uint32_t>());
    require(name == p.name, ErrorKind::Parse, "expected parameter '", p.name, "', found '", name, "'");
    Shape shape(r.get<std::uint32_t>());
    for (auto& e : shape) e = r.get<std::uint64_t>();
    require(shape == p.value.shape(), ErrorKind::ShapeMismatch, "parameter ", name, " stored as ", shape_str(shape),
            ", expected ", shape_str(p.value.shape()));
    for (real& v : p.value.data())
      v = type == ElementType::F32 ? static_cast<real>(r.get<float>()) : static_cast<real>(r.get<double>());
  }
  require(r.position() == body.size(), ErrorKind::Parse, "trailing bytes after the last parameter record");
  return m;
}

inline void save_weights(const LanmsffModel& m, const std::string& path, ElementType type = ElementType::F64) {
  const auto bytes = encode_weights(m, type);
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open ", path, " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(f), ErrorKind::Io, "failed writing ", path);
}

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open ", path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline LanmsffModel load_weights(const std::string& path, const LanmsffConfig& config) {
  const auto bytes = read_file_bytes(path);
  return decode_weights(bytes, config);
}

}  // namespace lanmsff::model
