#pragma once

#include <array>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lanmsff/data/fer2013.hpp"

namespace lanmsff::data {

/// Ten tagger vote counts: the eight emotions in schema order, then
/// unknown and not-a-face.
struct VoteRecord {
  std::string image_name;
  Split split = Split::Train;
  std::array<long, 10> votes{};
};

/// Column positions in the vote CSV. Defaults follow the published file:
/// Usage, Image name, neutral, happiness, surprise, sadness, anger,
/// disgust, fear, contempt, unknown, NF.
struct FerPlusLayout {
  std::size_t usage_column = 0;
  std::size_t name_column = 1;
  /// vote_columns[k] is the CSV column holding schema class k (k < 8),
  /// unknown (k = 8) and not-a-face (k = 9).
  std::array<std::size_t, 10> vote_columns{2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
};

inline std::vector<VoteRecord> parse_ferplus_votes(std::istream& in, const FerPlusLayout& layout = {}) {
  std::vector<VoteRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t needed = std::max(layout.usage_column, layout.name_column);
  for (auto c : layout.vote_columns) needed = std::max(needed, c);
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    long probe = 0;
    if (line_no == 1 && f.size() > layout.vote_columns[0] && !parse_int(f[layout.vote_columns[0]], probe)) continue;
    require(f.size() > needed, ErrorKind::Parse, "line ", line_no, ": expected at least ", needed + 1,
            " columns, got ", f.size());
    VoteRecord r;
    r.split = parse_usage(f[layout.usage_column], line_no);
    r.image_name = std::string(trim(f[layout.name_column]));
    for (std::size_t k = 0; k < 10; ++k) {
      long v = 0;
      require(parse_int(f[layout.vote_columns[k]], v) && v >= 0, ErrorKind::Parse, "line ", line_no,
              ": malformed vote count '", f[layout.vote_columns[k]], "'");
      r.votes[k] = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Majority label over all ten vote columns, ties to the lower index.
/// Returns -1 when the winner is unknown / not-a-face or there are no votes.
inline int majority_label(const VoteRecord& r) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 10; ++k)
    if (r.votes[k] > r.votes[best]) best = k;
  if (r.votes[best] == 0 || best >= 8) return -1;
  return static_cast<int>(best);
}

struct FerPlusResult {
  Dataset samples;
  std::size_t discarded = 0;
};

/// Relabels FER-2013 images with FERPlus majority votes. Vote rows align to
/// images by row order; a non-empty image name must match the image's id.
/// Rows with an empty name (images FERPlus dropped) or a non-emotion
/// majority are discarded.
inline FerPlusResult parse_ferplus(const std::vector<VoteRecord>& votes, const Dataset& fer_images) {
  require(votes.size() == fer_images.size(), ErrorKind::Parse, "FERPlus has ", votes.size(),
          " vote rows but FER-2013 has ", fer_images.size(), " images");
  FerPlusResult res;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    const auto& v = votes[i];
    const int label = majority_label(v);
    if (v.image_name.empty() || label < 0) {
      ++res.discarded;
      continue;
    }
    require(v.image_name == fer_images[i].source_id, ErrorKind::Parse, "vote row ", i + 1, " names ", v.image_name,
            " but the aligned image is ", fer_images[i].source_id);
    Sample s = fer_images[i];
    s.label = label;
    s.split = v.split;
    res.samples.push_back(std::move(s));
  }
  return res;
}

inline FerPlusResult parse_ferplus(std::istream& votes_csv, const Dataset& fer_images,
                                   const FerPlusLayout& layout = {}) {
  return parse_ferplus(parse_ferplus_votes(votes_csv, layout), fer_images);
}

}  // namespace lanmsff::data
