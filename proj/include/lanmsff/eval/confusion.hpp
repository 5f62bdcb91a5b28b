#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanmsff/core.hpp"

namespace lanmsff::eval {

/// Rows are actual classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 0) : k_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return k_; }

  void add(int actual, int predicted) {
    require(actual >= 0 && predicted >= 0 && static_cast<std::size_t>(actual) < k_ &&
                static_cast<std::size_t>(predicted) < k_,
            ErrorKind::InvalidArgument, "confusion entry (", actual, ",", predicted, ") outside ", k_, " classes");
    ++counts_[static_cast<std::size_t>(actual) * k_ + static_cast<std::size_t>(predicted)];
  }

  std::size_t count(std::size_t actual, std::size_t predicted) const { return counts_[actual * k_ + predicted]; }

  std::size_t support(std::size_t actual) const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < k_; ++j) n += count(actual, j);
    return n;
  }

  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts_) n += c;
    return n;
  }

  std::size_t correct() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < k_; ++i) n += count(i, i);
    return n;
  }

  double accuracy() const { return total() ? 100.0 * static_cast<double>(correct()) / static_cast<double>(total()) : 0; }

  /// Per-class recall in percent; 0 for classes without samples.
  double recall(std::size_t actual) const {
    const auto s = support(actual);
    return s ? 100.0 * static_cast<double>(count(actual, actual)) / static_cast<double>(s) : 0.0;
  }

  /// Each row scaled to percentages of that class's support. Rows of
  /// absent classes are all zero.
  std::vector<std::vector<double>> normalized() const {
    std::vector<std::vector<double>> m(k_, std::vector<double>(k_, 0.0));
    for (std::size_t i = 0; i < k_; ++i) {
      const auto s = support(i);
      if (!s) continue;
      for (std::size_t j = 0; j < k_; ++j) m[i][j] = 100.0 * static_cast<double>(count(i, j)) / static_cast<double>(s);
    }
    return m;
  }

  std::string table(const std::vector<std::string>& names) const {
    const auto m = normalized();
    std::string s;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-10s", "");
    s += cell;
    for (std::size_t j = 0; j < k_; ++j) {
      std::snprintf(cell, sizeof cell, "%9.9s", j < names.size() ? names[j].c_str() : std::to_string(j).c_str());
      s += cell;
    }
    s += "\n";
    for (std::size_t i = 0; i < k_; ++i) {
      std::snprintf(cell, sizeof cell, "%-10.10s", i < names.size() ? names[i].c_str() : std::to_string(i).c_str());
      s += cell;
      for (std::size_t j = 0; j < k_; ++j) {
        std::snprintf(cell, sizeof cell, "%9.2f", m[i][j]);
        s += cell;
      }
      s += "\n";
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json counts = nlohmann::json::array();
    for (std::size_t i = 0; i < k_; ++i) {
      std::vector<std::size_t> row(counts_.begin() + static_cast<std::ptrdiff_t>(i * k_),
                                   counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_));
      counts.push_back(row);
    }
    return {{"counts", counts}, {"normalized", normalized()}};
  }

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

}  // namespace lanmsff::eval
