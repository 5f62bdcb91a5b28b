#pragma once

// Accuracy, parameter and derived-metric figures as printed for the
// comparison and ablation tables. Parameters are in thousands.

#include <optional>
#include <string>
#include <vector>

namespace published {

struct DensityRow {
  std::string method;
  double accuracy;
  double params_k;
  double density;
  int decimals;  // printed precision of `density`
};

inline const std::vector<DensityRow> kFer2013Density = {
    {"SHCNN", 69.10, 8700, 7.9, 1},
    {"Light CNN", 68.00, 1108, 61.3, 1},
    {"BReG-NeXt-32", 69.11, 1900, 36.37, 2},
    {"BReG-NeXt-50", 71.53, 3100, 23.07, 2},
    {"Dense_FaceLiveNet", 69.99, 15300, 4.57, 2},
    {"Block-FreNet", 64.41, 9000, 7.16, 2},
    {"SAN-CNN", 74.17, 6580, 11.2, 1},
    {"AR-TE-CATFFNet", 74.84, 32117, 2.3, 1},
    {"AMP_NET", 74.48, 105670, 0.7, 1},
    {"LANMSFF", 70.44, 358, 196, 0},
};

inline const std::vector<DensityRow> kFerPlusDensity = {
    {"SHCNN", 86.50, 8700, 9.94, 2},
    {"FENN", 89.53, 11470, 7.80, 2},
    {"PACVT", 88.72, 28400, 3.1, 1},
    {"TST-RRN", 89.64, 1820, 49.25, 2},
    {"RAN", 89.16, 11180, 7.94, 2},
    {"CERN", 88.17, 1450, 60.8, 1},
    {"VTF", 88.81, 80000, 1.1, 1},
    {"LANMSFF", 86.96, 358, 242, 0},
};

struct VarianceRow {
  std::string method;
  std::vector<double> pose_accuracy;
  double overall;
  double variance;
};

/// Per-pose accuracies at −90°, −45°, 0°, +45°, +90°.
inline const std::vector<VarianceRow> kKdefVariance = {
    {"DML-NET", {89.20, 88.80, 91.30, 85.60, 86.10}, 88.20, 3.69},
    {"SSA-Net", {90.20, 90.20, 89.70, 83.50, 89.10}, 88.50, 5.42},
    {"OCA-MTL", {87.04, 89.18, 92.24, 89.18, 87.55}, 89.04, 2.74},
    {"LANMSFF", {89.44, 91.18, 92.04, 91.00, 90.17}, 90.77, 0.66},
};

/// Accuracies on the >30° and >45° pose subsets.
inline const std::vector<VarianceRow> kPoseFerPlusVariance = {
    {"RAN", {82.23, 80.40}, 89.16, 14.23},
    {"CERN", {86.84, 84.83}, 88.17, 1.88},
    {"FG-AGR", {88.38, 87.52}, 91.09, 2.31},
    {"VTF", {88.29, 87.20}, 88.81, 0.45},
    {"LANMSFF", {86.92, 84.68}, 86.96, 1.13},
};

/// Ablation rows, same pose columns as the KDEF comparison.
inline const std::vector<VarianceRow> kAblationVariance = {
    {"whole model", {89.44, 91.18, 92.04, 91.00, 90.17}, 90.77, 0.66},
    {"without PWFS", {89.85, 91.28, 92.05, 92.84, 90.16}, 91.24, 1.05},
    {"without MassAtt", {87.59, 91.59, 92.15, 92.43, 90.38}, 90.83, 2.59},
    {"without both", {89.14, 90.57, 91.75, 92.53, 88.93}, 90.58, 1.65},
};

inline constexpr double kTolerance = 0.05;

}  // namespace published
