#pragma once

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanmsff/data/schema.hpp"
#include "lanmsff/model/lanmsff.hpp"
#include "lanmsff/nn/loss.hpp"
#include "lanmsff/train/adam.hpp"
#include "lanmsff/train/schedule.hpp"

namespace lanmsff::train {

struct TrainConfig {
  std::size_t batch_size = 32;
  real lr0 = real(1e-3);
  std::size_t patience_epochs = 8;
  real decay_factor = real(0.5);
  ScheduleMode schedule = ScheduleMode::Patience;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;
  AdamOptions adam;
  /// Epoch numbering offset; seeds derive from the absolute epoch index so a
  /// resumed run replays the same shuffles and dropout masks.
  std::size_t start_epoch = 0;

  void validate() const {
    require(batch_size >= 1, ErrorKind::InvalidConfig, "batch_size must be at least 1");
    require(lr0 > 0, ErrorKind::InvalidConfig, "lr0 must be positive, got ", lr0);
    require(decay_factor > 0 && decay_factor < 1, ErrorKind::InvalidConfig, "decay_factor must be in (0,1)");
    require(patience_epochs >= 1, ErrorKind::InvalidConfig, "patience_epochs must be at least 1");
  }

  ScheduleConfig schedule_config() const { return {patience_epochs, decay_factor, schedule}; }
};

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"lr0", c.lr0},
          {"patience_epochs", c.patience_epochs},
          {"decay_factor", c.decay_factor},
          {"schedule", to_string(c.schedule)},
          {"max_epochs", c.max_epochs},
          {"seed", c.seed},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"eps_adam", c.adam.epsilon},
          {"start_epoch", c.start_epoch}};
}

struct EpochRecord {
  std::size_t epoch = 0;
  real train_loss = 0, train_acc = 0;
  real val_loss = 0, val_acc = 0;
  real lr = 0;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;

  std::string to_csv() const {
    std::string s = "epoch,train_loss,train_acc,val_loss,val_acc,lr\n";
    char line[256];
    for (const auto& e : epochs) {
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.epoch, static_cast<double>(e.train_loss),
                    static_cast<double>(e.train_acc), static_cast<double>(e.val_loss), static_cast<double>(e.val_acc),
                    static_cast<double>(e.lr));
      s += line;
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : epochs)
      j.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"train_acc", e.train_acc},
                   {"val_loss", e.val_loss},
                   {"val_acc", e.val_acc},
                   {"lr", e.lr}});
    return j;
  }
};

struct LossAccuracy {
  real loss = 0;
  real accuracy = 0;  // percent
};

/// Eval-mode logits for every sample, in order.
inline Tensor predict_logits(model::LanmsffModel& m, const data::Dataset& samples, std::size_t batch_size = 32) {
  require(!samples.empty(), ErrorKind::InvalidArgument, "cannot predict on an empty sample set");
  NoGradScope no_grad;
  const std::size_t k = m.config().num_classes;
  Tensor out({samples.size(), k});
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    idx.clear();
    for (std::size_t i = start; i < std::min(samples.size(), start + batch_size); ++i) idx.push_back(i);
    Tensor logits = m.logits(data::make_batch(samples, idx), {nn::Mode::Eval, 0});
    std::copy(logits.data().begin(), logits.data().end(), out.ptr() + start * k);
  }
  return out;
}

inline LossAccuracy evaluate_loss_accuracy(model::LanmsffModel& m, const data::Dataset& samples,
                                           std::size_t batch_size = 32) {
  Tensor logits = predict_logits(m, samples, batch_size);
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  NoGradScope no_grad;
  LossAccuracy r;
  r.loss = nn::softmax_cross_entropy(logits, labels).item();
  const auto pred = model::argmax_rows(logits);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i];
  r.accuracy = real(100) * static_cast<real>(correct) / static_cast<real>(samples.size());
  return r;
}

/// Optimizer and schedule state needed to continue a run exactly.
struct ResumeState {
  AdamState optimizer;
  real lr = 0;
  std::vector<real> val_history;
  std::size_t next_epoch = 0;
};

struct FitResult {
  TrainingLog log;
  model::ParameterSnapshot best_weights;
  std::size_t best_epoch = 0;
  real best_val_acc = -1;
  AdamState optimizer;
  real next_lr = 0;
  std::vector<real> val_history;

  ResumeState resume_state() const {
    return {optimizer, next_lr, val_history, log.epochs.empty() ? 0 : log.epochs.back().epoch};
  }
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam training with seeded per-epoch shuffling, validation-loss
/// driven learning-rate decay and best-validation-accuracy weight retention.
/// The model is left holding its final-epoch weights. With `resume`, the
/// run continues from that state and cfg.start_epoch is taken from it.
inline FitResult fit(model::LanmsffModel& m, const data::Dataset& train_set, const data::Dataset& val_set,
                     TrainConfig cfg, const EpochCallback& on_epoch = {}, const ResumeState* resume = nullptr) {
  cfg.validate();
  require(!train_set.empty(), ErrorKind::InvalidArgument, "training split is empty");
  require(!val_set.empty(), ErrorKind::InvalidArgument, "validation split is empty");
  const std::size_t classes = m.config().num_classes;
  for (const auto* set : {&train_set, &val_set})
    for (const auto& s : *set)
      require(s.label >= 0 && static_cast<std::size_t>(s.label) < classes, ErrorKind::InvalidArgument, "sample ",
              s.source_id, " has label ", s.label, " but the model has ", classes, " classes");

  FitResult result;
  result.optimizer = AdamState::for_parameters(m.parameters());
  std::vector<real> val_history;
  real lr = cfg.lr0;
  if (resume) {
    require(resume->optimizer.m.size() == m.parameters().size(), ErrorKind::InvalidArgument,
            "resume state does not match the model's parameter list");
    result.optimizer = resume->optimizer;
    lr = resume->lr;
    val_history = resume->val_history;
    cfg.start_epoch = resume->next_epoch;
  }
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t e = 0; e < cfg.max_epochs; ++e) {
    const std::size_t epoch = cfg.start_epoch + e;
    const std::uint64_t epoch_seed = mix_seed(cfg.seed, epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng(epoch_seed).shuffle(order);

    real loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += cfg.batch_size, ++b) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(cfg.batch_size, order.size() - start));
      const auto labels = data::batch_labels(train_set, idx);
      Tape tape;
      Tensor logits, loss;
      {
        TapeScope scope(tape);
        logits = m.logits(data::make_batch(train_set, idx), {nn::Mode::Train, mix_seed(epoch_seed, b + 1)});
        loss = nn::softmax_cross_entropy(logits, labels);
      }
      m.parameters().zero_grad();
      tape.backward(loss);
      adam_step(m.parameters(), result.optimizer, lr, cfg.adam);
      loss_sum += loss.item() * static_cast<real>(idx.size());
      const auto pred = model::argmax_rows(logits);
      for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i];
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / static_cast<real>(train_set.size());
    rec.train_acc = real(100) * static_cast<real>(correct) / static_cast<real>(train_set.size());
    const auto val = evaluate_loss_accuracy(m, val_set, cfg.batch_size);
    rec.val_loss = val.loss;
    rec.val_acc = val.accuracy;
    rec.lr = lr;
    result.log.epochs.push_back(rec);
    if (rec.val_acc > result.best_val_acc) {
      result.best_val_acc = rec.val_acc;
      result.best_epoch = rec.epoch;
      result.best_weights = m.snapshot();
    }
    val_history.push_back(rec.val_loss);
    lr = lr_schedule(val_history, lr, cfg.schedule_config());
    if (on_epoch) on_epoch(rec);
  }
  result.next_lr = lr;
  result.val_history = std::move(val_history);
  return result;
}

}  // namespace lanmsff::train
