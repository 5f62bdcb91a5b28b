#pragma once

#include <cmath>
#include <vector>

#include "lanmsff/core.hpp"

namespace lanmsff::eval {

/// Accuracy (percent) per million parameters.
inline double information_density(double accuracy_pct, double param_count) {
  require(param_count > 0, ErrorKind::InvalidArgument, "information_density needs a positive parameter count, got ",
          param_count);
  return accuracy_pct / (param_count / 1e6);
}

/// Population variance of the per-pose accuracies together with the
/// overall accuracy as one extra observation.
inline double pose_variance(const std::vector<double>& per_pose, double overall) {
  require(!per_pose.empty(), ErrorKind::InvalidArgument, "pose_variance needs at least one pose accuracy");
  std::vector<double> xs = per_pose;
  xs.push_back(overall);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return var / static_cast<double>(xs.size());
}

/// Drops digits beyond `decimals` places, toward zero.
inline double truncate_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::trunc(v * scale + (v >= 0 ? 1e-9 : -1e-9)) / scale;
}

inline double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace lanmsff::eval
