#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff::data {

enum class Split { Train, Val, Test };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

/// Head pose in degrees; unset when the source carries no pose.
using Pose = std::optional<int>;

inline constexpr int kPoseAngles[5] = {-90, -45, 0, 45, 90};

inline std::string pose_str(const Pose& p) {
  if (!p) return "unknown";
  return (*p > 0 ? "+" : "") + std::to_string(*p);
}

/// One normalized image (channel-major, size × size per channel, values in
/// [0,1]) with its label and provenance.
struct Sample {
  std::vector<real> image;
  std::size_t channels = 1;
  std::size_t size = 64;
  int label = 0;
  Pose pose;
  Split split = Split::Train;
  std::string source_id;
};

using Dataset = std::vector<Sample>;

struct LabelSchema {
  std::string name;
  std::vector<std::string> classes;

  std::size_t size() const { return classes.size(); }

  int index_of(const std::string& cls) const {
    auto it = std::find(classes.begin(), classes.end(), cls);
    require(it != classes.end(), ErrorKind::InvalidArgument, "class '", cls, "' not in schema ", name);
    return static_cast<int>(it - classes.begin());
  }

  void validate() const {
    auto sorted = classes;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::InvalidConfig,
            "schema ", name, " has duplicate class names");
    require(!classes.empty(), ErrorKind::InvalidConfig, "schema ", name, " is empty");
  }
};

/// FER-2013 label column order.
inline LabelSchema fer2013_schema() {
  return {"fer2013", {"angry", "disgust", "fear", "happy", "sad", "surprise", "neutral"}};
}

inline LabelSchema ferplus_schema() {
  return {"ferplus", {"neutral", "happy", "surprise", "sad", "angry", "disgust", "fear", "contempt"}};
}

/// KDEF uses the seven FER-2013 classes.
inline LabelSchema kdef_schema() {
  auto s = fer2013_schema();
  s.name = "kdef";
  return s;
}

inline Dataset filter_split(const Dataset& d, Split split) {
  Dataset out;
  for (const auto& s : d)
    if (s.split == split) out.push_back(s);
  return out;
}

inline Dataset select(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(d.at(i));
  return out;
}

inline std::vector<std::size_t> class_counts(const Dataset& d, std::size_t classes) {
  std::vector<std::size_t> c(classes, 0);
  for (const auto& s : d) c.at(static_cast<std::size_t>(s.label))++;
  return c;
}

/// Stacks samples[idx...] into an (N,C,S,S) tensor.
inline Tensor make_batch(const Dataset& samples, std::span<const std::size_t> idx) {
  require(!idx.empty(), ErrorKind::InvalidArgument, "empty batch");
  const auto& first = samples.at(idx[0]);
  const std::size_t per = first.channels * first.size * first.size;
  Tensor t({idx.size(), first.channels, first.size, first.size});
  for (std::size_t b = 0; b < idx.size(); ++b) {
    const auto& s = samples.at(idx[b]);
    require(s.image.size() == per, ErrorKind::ShapeMismatch, "sample ", s.source_id, " has ", s.image.size(),
            " values, batch expects ", per);
    std::copy(s.image.begin(), s.image.end(), t.ptr() + b * per);
  }
  return t;
}

inline std::vector<int> batch_labels(const Dataset& samples, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(samples.at(i).label);
  return out;
}

}  // namespace lanmsff::data
