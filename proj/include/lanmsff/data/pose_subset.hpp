#pragma once

#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "lanmsff/data/csv.hpp"
#include "lanmsff/data/schema.hpp"

namespace lanmsff::data {

/// One identifier per line; blank lines and '#' comments ignored.
inline std::vector<std::string> read_index(std::istream& in) {
  std::vector<std::string> ids;
  std::string line;
  while (read_line(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    ids.emplace_back(t);
  }
  return ids;
}

inline std::vector<std::string> read_index_file(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open pose index ", path);
  return read_index(f);
}

struct PoseSubset {
  int threshold_deg = 0;
  Dataset samples;
  std::vector<std::string> missing;  // listed ids absent from the dataset
};

/// Samples whose source id is listed, in dataset order.
inline PoseSubset pose_subset(const Dataset& samples, const std::vector<std::string>& ids, int threshold_deg) {
  PoseSubset out{threshold_deg, {}, {}};
  const std::set<std::string> wanted(ids.begin(), ids.end());
  std::set<std::string> found;
  for (const auto& s : samples)
    if (wanted.count(s.source_id)) {
      out.samples.push_back(s);
      found.insert(s.source_id);
    }
  for (const auto& id : wanted)
    if (!found.count(id)) out.missing.push_back(id);
  return out;
}

/// A stricter pose threshold must select a subset of the looser one.
inline void check_containment(const std::vector<std::string>& strict, const std::vector<std::string>& loose,
                              int strict_deg, int loose_deg) {
  const std::set<std::string> outer(loose.begin(), loose.end());
  for (const auto& id : strict)
    require(outer.count(id) != 0, ErrorKind::InvalidArgument, "'", id, "' is in the >", strict_deg,
            "° subset but not in the >", loose_deg, "° subset");
}

}  // namespace lanmsff::data
