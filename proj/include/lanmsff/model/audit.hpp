#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanmsff/model/lanmsff.hpp"

namespace lanmsff::model {

/// Published parameter figure the audit is compared against.
inline constexpr std::size_t kReferenceParameterCount = 358000;
inline constexpr double kReferenceBand = 0.10;

struct AuditRow {
  std::string name;
  Shape shape;
  std::size_t count = 0;
  bool trainable = true;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  std::map<std::string, std::size_t> block_totals;     // block1..block4, classifier
  std::map<std::string, std::size_t> massatt_totals;   // per attention instance
  std::size_t grand_total = 0;                         // all stored parameters
  std::size_t trainable_total = 0;
  std::size_t fusion_length = 0;
  std::size_t reference = kReferenceParameterCount;

  double relative_deviation() const {
    return (static_cast<double>(grand_total) - static_cast<double>(reference)) / static_cast<double>(reference);
  }
  bool within_band() const { return std::abs(relative_deviation()) <= kReferenceBand; }
  std::size_t massatt_total() const {
    std::size_t n = 0;
    for (const auto& [_, v] : massatt_totals) n += v;
    return n;
  }

  std::string table() const {
    std::string s;
    char line[256];
    std::snprintf(line, sizeof line, "%-40s %-16s %10s\n", "parameter", "shape", "count");
    s += line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-40s %-16s %10zu%s\n", r.name.c_str(), shape_str(r.shape).c_str(), r.count,
                    r.trainable ? "" : "  (non-trainable)");
      s += line;
    }
    s += "\n";
    for (const auto& [k, v] : block_totals) {
      std::snprintf(line, sizeof line, "%-40s %27zu\n", (k + " total").c_str(), v);
      s += line;
    }
    for (const auto& [k, v] : massatt_totals) {
      std::snprintf(line, sizeof line, "%-40s %27zu\n", (k + " total").c_str(), v);
      s += line;
    }
    std::snprintf(line, sizeof line, "%-40s %27zu\n", "fusion length", fusion_length);
    s += line;
    std::snprintf(line, sizeof line, "%-40s %27zu\n", "trainable total", trainable_total);
    s += line;
    std::snprintf(line, sizeof line, "%-40s %27zu\n", "grand total", grand_total);
    s += line;
    std::snprintf(line, sizeof line, "%-40s %27zu  (%+.2f%%, band ±%.0f%%: %s)\n", "reference", reference,
                  100.0 * relative_deviation(), 100.0 * kReferenceBand, within_band() ? "inside" : "outside");
    s += line;
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"name", r.name}, {"shape", r.shape}, {"count", r.count}, {"trainable", r.trainable}});
    j["block_totals"] = block_totals;
    j["massatt_totals"] = massatt_totals;
    j["grand_total"] = grand_total;
    j["trainable_total"] = trainable_total;
    j["fusion_length"] = fusion_length;
    j["reference"] = reference;
    j["relative_deviation"] = relative_deviation();
    j["within_band"] = within_band();
    return j;
  }
};

inline AuditReport audit_parameters(const LanmsffModel& m) {
  AuditReport a;
  for (const auto& p : m.parameters()) {
    AuditRow r{p.name, p.value.shape(), p.value.numel(), p.trainable};
    const std::string block = p.name.substr(0, p.name.find('.'));
    a.block_totals[block] += r.count;
    const auto at = p.name.find(".massatt.");
    if (at != std::string::npos) a.massatt_totals[p.name.substr(0, at + 8)] += r.count;
    a.grand_total += r.count;
    if (r.trainable) a.trainable_total += r.count;
    a.rows.push_back(std::move(r));
  }
  a.fusion_length = m.config().fusion_length();
  return a;
}

}  // namespace lanmsff::model
