#pragma once

#include <limits>
#include <string>
#include <vector>

#include "lanmsff/core.hpp"

namespace lanmsff::train {

enum class ScheduleMode {
  /// Decay once the best validation loss has gone `patience` epochs without
  /// improving; the counter then restarts.
  Patience,
  /// Every `patience` epochs, decay if that window did not improve the best loss.
  FixedInterval,
};

struct ScheduleConfig {
  std::size_t patience = 8;
  real decay_factor = real(0.5);
  ScheduleMode mode = ScheduleMode::Patience;
};

/// Whether the epoch that produced history.back() triggers a decay.
inline bool decay_due(const std::vector<real>& history, const ScheduleConfig& cfg) {
  require(cfg.patience >= 1, ErrorKind::InvalidConfig, "patience must be at least 1");
  if (history.empty()) return false;
  real best = std::numeric_limits<real>::infinity();
  if (cfg.mode == ScheduleMode::Patience) {
    std::size_t stale = 0;
    bool fired = false;
    for (real loss : history) {
      fired = false;
      if (loss < best) {
        best = loss;
        stale = 0;
      } else if (++stale == cfg.patience) {
        fired = true;
        stale = 0;
      }
    }
    return fired;
  }
  if (history.size() % cfg.patience != 0) return false;
  const std::size_t window_start = history.size() - cfg.patience;
  for (std::size_t i = 0; i < window_start; ++i) best = std::min(best, history[i]);
  for (std::size_t i = window_start; i < history.size(); ++i)
    if (history[i] < best) return false;
  return true;
}

/// Learning rate for the next epoch given the validation-loss history so far.
inline real lr_schedule(const std::vector<real>& history, real current_lr, const ScheduleConfig& cfg) {
  require(cfg.decay_factor > 0 && cfg.decay_factor < 1, ErrorKind::InvalidConfig, "decay_factor must be in (0,1), got ",
          cfg.decay_factor);
  return decay_due(history, cfg) ? current_lr * cfg.decay_factor : current_lr;
}

inline const char* to_string(ScheduleMode m) { return m == ScheduleMode::Patience ? "patience" : "fixed_interval"; }

}  // namespace lanmsff::train
