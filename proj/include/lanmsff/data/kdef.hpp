#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "lanmsff/data/image_io.hpp"
#include "lanmsff/data/schema.hpp"

namespace lanmsff::data {

struct KdefName {
  char session = 'A';  // A or B
  char gender = 'F';   // F or M
  int actor = 0;
  int label = 0;  // fer2013_schema index
  int pose = 0;   // degrees

  /// Actor identity shared by both sessions, e.g. "F01".
  std::string actor_key() const { return std::string(1, gender) + (actor < 10 ? "0" : "") + std::to_string(actor); }
};

/// Decodes a KDEF file stem such as "AF01ANFL". Case-insensitive; returns
/// nothing for names that do not follow the convention.
inline std::optional<KdefName> parse_kdef_name(std::string stem) {
  std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) { return std::toupper(c); });
  static const std::regex re("^([AB])([FM])(\\d\\d)(AF|AN|DI|HA|NE|SA|SU)(FL|HL|S|HR|FR)$");
  std::smatch m;
  if (!std::regex_match(stem, m, re)) return std::nullopt;
  KdefName n;
  n.session = m[1].str()[0];
  n.gender = m[2].str()[0];
  n.actor = std::stoi(m[3].str());
  const std::string e = m[4].str();
  const auto schema = kdef_schema();
  n.label = schema.index_of(e == "AF"   ? "fear"
                            : e == "AN" ? "angry"
                            : e == "DI" ? "disgust"
                            : e == "HA" ? "happy"
                            : e == "NE" ? "neutral"
                            : e == "SA" ? "sad"
                                        : "surprise");
  const std::string a = m[5].str();
  n.pose = a == "FL" ? -90 : a == "HL" ? -45 : a == "S" ? 0 : a == "HR" ? 45 : 90;
  return n;
}

struct KdefResult {
  Dataset samples;
  std::vector<std::string> actor_keys;  // parallel to samples
  std::vector<std::string> skipped;     // "path: reason"
};

/// Walks `root` recursively, in sorted path order, and loads every image
/// whose stem follows the KDEF naming convention. Unrecognized names and
/// unreadable files are skipped and listed, not fatal.
inline KdefResult parse_kdef(const std::filesystem::path& root, std::size_t size = 64, std::size_t channels = 1) {
  require(std::filesystem::is_directory(root), ErrorKind::Io, "KDEF directory not found: ", root.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  KdefResult res;
  for (const auto& path : files) {
    const auto name = parse_kdef_name(path.stem().string());
    if (!name) {
      res.skipped.push_back(path.string() + ": unrecognized KDEF code");
      continue;
    }
    RawImage raw;
    try {
      raw = read_image(path);
    } catch (const Error& e) {
      res.skipped.push_back(path.string() + ": " + e.what());
      continue;
    }
    Sample s;
    s.size = size;
    s.channels = channels;
    s.label = name->label;
    s.pose = name->pose;
    s.split = Split::Train;
    s.source_id = path.stem().string();
    for (const auto& plane : to_planes(raw, channels)) {
      auto p = preprocess(plane, size);
      s.image.insert(s.image.end(), p.begin(), p.end());
    }
    res.samples.push_back(std::move(s));
    res.actor_keys.push_back(name->actor_key());
  }
  return res;
}

}  // namespace lanmsff::data
