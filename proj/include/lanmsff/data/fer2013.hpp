#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lanmsff/data/csv.hpp"
#include "lanmsff/data/image.hpp"
#include "lanmsff/data/schema.hpp"

namespace lanmsff::data {

inline constexpr std::size_t kFerSide = 48;
inline constexpr std::size_t kFerPixels = kFerSide * kFerSide;

inline std::string fer_image_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fer%07zu.png", index);
  return buf;
}

inline Split parse_usage(std::string_view usage, std::size_t line_no) {
  usage = trim(usage);
  if (usage == "Training") return Split::Train;
  if (usage == "PublicTest") return Split::Val;
  if (usage == "PrivateTest") return Split::Test;
  fail(ErrorKind::Parse, "line ", line_no, ": unknown usage '", usage, "'");
}

/// FER-2013 CSV (emotion,pixels,Usage). Each 48×48 image is resized to
/// `size` × `size` and min-max normalized. Source ids follow the
/// fer%07d.png naming of the data row index. Errors name the file line.
inline Dataset parse_fer2013(std::istream& in, std::size_t size = 64) {
  Dataset out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<unsigned char> pixels(kFerPixels);
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    long label = 0;
    if (line_no == 1 && !fields.empty() && !parse_int(fields[0], label)) continue;  // header
    require(fields.size() >= 3, ErrorKind::Parse, "line ", line_no, ": expected 3 fields, got ", fields.size());
    require(parse_int(fields[0], label), ErrorKind::Parse, "line ", line_no, ": malformed label '", fields[0], "'");
    require(label >= 0 && label <= 6, ErrorKind::Parse, "line ", line_no, ": label ", label, " outside [0,6]");

    std::size_t count = 0;
    std::string_view px = fields[1];
    std::size_t pos = 0;
    while (pos < px.size()) {
      while (pos < px.size() && px[pos] == ' ') ++pos;
      if (pos >= px.size()) break;
      std::size_t end = px.find(' ', pos);
      if (end == std::string_view::npos) end = px.size();
      long v = 0;
      require(parse_int(px.substr(pos, end - pos), v) && v >= 0 && v <= 255, ErrorKind::Parse, "line ", line_no,
              ": malformed pixel value '", px.substr(pos, end - pos), "'");
      if (count < kFerPixels) pixels[count] = static_cast<unsigned char>(v);
      ++count;
      pos = end;
    }
    require(count == kFerPixels, ErrorKind::Parse, "line ", line_no, ": expected ", kFerPixels, " pixels, got ",
            count);

    Sample s;
    s.size = size;
    s.channels = 1;
    s.label = static_cast<int>(label);
    s.split = parse_usage(fields[2], line_no);
    s.source_id = fer_image_name(out.size());
    s.image = preprocess(from_bytes(pixels, kFerSide, kFerSide), size);
    out.push_back(std::move(s));
  }
  return out;
}

inline Dataset parse_fer2013_file(const std::string& path, std::size_t size = 64) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open FER-2013 CSV ", path);
  return parse_fer2013(f, size);
}

struct SplitCounts {
  std::size_t train = 0, val = 0, test = 0;
  std::size_t total() const { return train + val + test; }
};

inline SplitCounts split_counts(const Dataset& d) {
  SplitCounts c;
  for (const auto& s : d) {
    if (s.split == Split::Train) ++c.train;
    else if (s.split == Split::Val) ++c.val;
    else ++c.test;
  }
  return c;
}

}  // namespace lanmsff::data
