#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "lanmsff/tensor.hpp"

namespace lanmsff {

struct GradCheckOptions {
  real h = real(1e-5);
  real tol = real(1e-4);
  /// Coordinates sampled per input tensor; 0 checks every coordinate.
  std::size_t max_coords_per_input = 0;
  std::uint64_t seed = 0;
  /// A coordinate is excluded when any ReLU/max/median branch decision
  /// differs between x and x ± kink_radius*h (or x ± h).
  real kink_radius = real(10);
  /// Smallest denominator of the relative error. Gradients below it are
  /// judged on absolute error tol*abs_floor, which keeps central-difference
  /// rounding noise (about eps*|f|/h) from failing near-zero coordinates.
  real abs_floor = real(1e-8);
};

struct CoordinateRef {
  std::size_t input = 0;
  std::size_t index = 0;
};

struct GradCheckReport {
  real max_rel_err = 0;
  bool pass = false;
  std::size_t checked = 0;
  std::vector<CoordinateRef> excluded;
  /// Checked coordinates whose gradient magnitude fell below abs_floor.
  std::size_t floored = 0;
  CoordinateRef worst;
  real worst_analytic = 0;
  real worst_numeric = 0;

  std::string summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "FAIL") << ": max_rel_err=" << max_rel_err << " over " << checked << " coordinates, "
       << excluded.size() << " excluded near non-differentiable points";
    if (floored) os << ", " << floored << " below the absolute floor";
    if (checked)
      os << "; worst input " << worst.input << "[" << worst.index << "] analytic=" << worst_analytic
         << " numeric=" << worst_numeric;
    return os.str();
  }
};

inline real relative_error(real analytic, real numeric, real floor = real(1e-8)) {
  const real denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

/// Compares reverse-mode gradients of the scalar `fn` with respect to
/// `inputs` against central differences (f(x+h) - f(x-h)) / 2h.
inline GradCheckReport check_gradients(const std::function<Tensor()>& fn, std::vector<Tensor> inputs,
                                       const GradCheckOptions& opt = {}) {
  require(opt.h > 0, ErrorKind::InvalidArgument, "check_gradients: h must be positive");
  std::vector<bool> prior(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    prior[i] = inputs[i].requires_grad();
    inputs[i].set_requires_grad(true);
    inputs[i].ensure_grad();
    inputs[i].zero_grad();
  }

  std::vector<std::vector<real>> analytic(inputs.size());
  {
    Tape tape;
    TapeScope scope(tape);
    Tensor out = fn();
    require(out.numel() == 1, ErrorKind::ShapeMismatch, "check_gradients: fn must return a scalar, got ",
            shape_str(out.shape()));
    if (!tape.empty() && out.requires_grad()) tape.backward(out);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      auto g = inputs[i].grad();
      analytic[i].assign(g.begin(), g.end());
    }
  }

  NoGradScope no_grad;
  auto eval = [&](std::uint64_t* signature) {
    KinkMonitor monitor;
    const real v = fn().item();
    if (signature) *signature = monitor.signature();
    return v;
  };
  std::uint64_t base_sig = 0;
  eval(&base_sig);

  GradCheckReport report;
  Rng rng(opt.seed);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Tensor& t = inputs[i];
    std::vector<std::size_t> coords(t.numel());
    for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = k;
    if (opt.max_coords_per_input && coords.size() > opt.max_coords_per_input) {
      rng.shuffle(coords);
      coords.resize(opt.max_coords_per_input);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t k : coords) {
      const real saved = t[k];
      std::uint64_t sp = 0, sm = 0, sfp = 0, sfm = 0;
      t[k] = saved + opt.h;
      const real fp = eval(&sp);
      t[k] = saved - opt.h;
      const real fm = eval(&sm);
      bool kink = sp != base_sig || sm != base_sig;
      if (!kink && opt.kink_radius > 1) {
        t[k] = saved + opt.kink_radius * opt.h;
        eval(&sfp);
        t[k] = saved - opt.kink_radius * opt.h;
        eval(&sfm);
        kink = sfp != base_sig || sfm != base_sig;
      }
      t[k] = saved;
      if (kink) {
        report.excluded.push_back({i, k});
        continue;
      }
      const real numeric = (fp - fm) / (2 * opt.h);
      const real err = relative_error(analytic[i][k], numeric, opt.abs_floor);
      ++report.checked;
      if (std::max(std::abs(analytic[i][k]), std::abs(numeric)) < opt.abs_floor) ++report.floored;
      if (err > report.max_rel_err || report.checked == 1) {
        if (err >= report.max_rel_err) {
          report.max_rel_err = err;
          report.worst = {i, k};
          report.worst_analytic = analytic[i][k];
          report.worst_numeric = numeric;
        }
      }
    }
  }
  report.pass = report.max_rel_err < opt.tol;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i].release_grad();
    inputs[i].set_requires_grad(prior[i]);
  }
  return report;
}

}  // namespace lanmsff
