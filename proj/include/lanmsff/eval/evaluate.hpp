#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanmsff/data/schema.hpp"
#include "lanmsff/eval/confusion.hpp"
#include "lanmsff/eval/metrics.hpp"
#include "lanmsff/model/lanmsff.hpp"
#include "lanmsff/train/fit.hpp"

namespace lanmsff::eval {

struct ClassAccuracy {
  std::string name;
  std::size_t support = 0;
  double accuracy = 0;
};

struct PoseAccuracy {
  int pose = 0;
  std::size_t count = 0;
  double accuracy = 0;
};

struct MetricsReport {
  double overall_accuracy = 0;
  std::size_t samples = 0;
  std::vector<ClassAccuracy> per_class;
  std::vector<PoseAccuracy> per_pose;  // ascending pose
  std::size_t param_count = 0;
  double information_density = 0;
  std::optional<double> pose_variance;  // only when pose tags exist

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["overall_accuracy"] = overall_accuracy;
    j["samples"] = samples;
    j["param_count"] = param_count;
    j["information_density"] = information_density;
    j["pose_variance"] = pose_variance ? nlohmann::json(*pose_variance) : nlohmann::json(nullptr);
    j["per_class"] = nlohmann::json::array();
    for (const auto& c : per_class)
      j["per_class"].push_back({{"class", c.name}, {"support", c.support}, {"accuracy", c.accuracy}});
    j["per_pose"] = nlohmann::json::array();
    for (const auto& p : per_pose)
      j["per_pose"].push_back({{"pose", p.pose}, {"count", p.count}, {"accuracy", p.accuracy}});
    return j;
  }

  std::string table() const {
    std::string s;
    char line[160];
    if (!per_pose.empty()) {
      std::snprintf(line, sizeof line, "%-10s %8s %10s\n", "pose", "samples", "accuracy");
      s += line;
      for (const auto& p : per_pose) {
        std::snprintf(line, sizeof line, "%-10s %8zu %10.2f\n", data::pose_str(p.pose).c_str(), p.count, p.accuracy);
        s += line;
      }
    }
    std::snprintf(line, sizeof line, "%-10s %8zu %10.2f\n", "whole", samples, overall_accuracy);
    s += line;
    s += "\n";
    std::snprintf(line, sizeof line, "%-10s %8s %10s\n", "class", "support", "accuracy");
    s += line;
    for (const auto& c : per_class) {
      std::snprintf(line, sizeof line, "%-10s %8zu %10.2f\n", c.name.c_str(), c.support, c.accuracy);
      s += line;
    }
    s += "\n";
    std::snprintf(line, sizeof line, "params %zu  ID %.2f", param_count, information_density);
    s += line;
    if (pose_variance) {
      std::snprintf(line, sizeof line, "  Var %.2f", *pose_variance);
      s += line;
    }
    s += "\n";
    return s;
  }
};

struct EvaluationResult {
  MetricsReport report;
  ConfusionMatrix confusion;
  std::map<int, ConfusionMatrix> per_pose_confusion;
};

/// Scores fixed predictions against the samples' labels.
inline EvaluationResult evaluate_predictions(const std::vector<int>& predictions, const data::Dataset& samples,
                                             const data::LabelSchema& schema, std::size_t param_count) {
  require(!samples.empty(), ErrorKind::InvalidArgument, "cannot evaluate an empty sample set");
  require(predictions.size() == samples.size(), ErrorKind::InvalidArgument, predictions.size(),
          " predictions for ", samples.size(), " samples");
  const std::size_t k = schema.size();
  EvaluationResult r{{}, ConfusionMatrix(k), {}};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    require(s.label >= 0 && static_cast<std::size_t>(s.label) < k, ErrorKind::InvalidArgument, "sample ", s.source_id,
            " label ", s.label, " outside schema ", schema.name);
    r.confusion.add(s.label, predictions[i]);
    if (s.pose) r.per_pose_confusion.try_emplace(*s.pose, k).first->second.add(s.label, predictions[i]);
  }
  auto& rep = r.report;
  rep.samples = samples.size();
  rep.overall_accuracy = r.confusion.accuracy();
  for (std::size_t c = 0; c < k; ++c)
    rep.per_class.push_back({schema.classes[c], r.confusion.support(c), r.confusion.recall(c)});
  std::vector<double> pose_acc;
  for (const auto& [pose, cm] : r.per_pose_confusion) {
    rep.per_pose.push_back({pose, cm.total(), cm.accuracy()});
    pose_acc.push_back(cm.accuracy());
  }
  if (!pose_acc.empty()) rep.pose_variance = pose_variance(pose_acc, rep.overall_accuracy);
  rep.param_count = param_count;
  if (param_count) rep.information_density = information_density(rep.overall_accuracy, static_cast<double>(param_count));
  return r;
}

/// Eval-mode predictions of `m` scored against `samples`.
inline EvaluationResult evaluate(model::LanmsffModel& m, const data::Dataset& samples,
                                 const data::LabelSchema& schema, std::size_t batch_size = 32) {
  require(schema.size() == m.config().num_classes, ErrorKind::InvalidArgument, "schema ", schema.name, " has ",
          schema.size(), " classes but the model predicts ", m.config().num_classes);
  const auto preds = model::argmax_rows(train::predict_logits(m, samples, batch_size));
  return evaluate_predictions(preds, samples, schema, m.parameters().count());
}

}  // namespace lanmsff::eval
