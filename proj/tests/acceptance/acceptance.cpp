// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_suite.hpp"
#include "lanmsff/lanmsff.hpp"
#include "lanmsff_cli.hpp"
#include "oracles.hpp"
#include "published_values.hpp"

using namespace lanmsff;
namespace fs = std::filesystem;

namespace {

// Pinned constants.
constexpr std::size_t kFusionLength = 156;
constexpr std::size_t kFrozenParameterTotal = 354614;
constexpr double kReferenceParameters = 358000;
constexpr double kParameterBand = 0.10;
constexpr double kPrintedPrecisionTol = published::kTolerance;  // 0.05
constexpr real kConvOracleTol = 1e-10;
constexpr real kMassAttOracleTol = 1e-12;
constexpr real kHomogeneityRelTol = 1e-12;
constexpr double kOverfitTarget = 95.0;
constexpr std::size_t kOverfitEpochs = 200;

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failures and a one-line summary for a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_++ < 5) notes_ += (notes_.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { info_ += (info_.empty() ? "" : "; ") + s; }
  Outcome outcome() const {
    std::string d = info_;
    if (!pass_) d += (d.empty() ? "" : "; ") + std::to_string(failures_) + " failure(s): " + notes_;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::size_t failures_ = 0;
  std::string notes_, info_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

real max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return INFINITY;
  real d = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

nn::ConvSpec conv_spec(std::size_t in, std::size_t out, std::size_t dil, std::size_t groups, bool bias) {
  nn::ConvSpec s;
  s.in_channels = in;
  s.out_channels = out;
  s.kernel = {3, 3};
  s.dilation = {dil, dil};
  s.groups = groups;
  s.bias = bias;
  return s;
}

// 1
Outcome fusion_length() {
  Check c;
  const model::LanmsffConfig cfg;
  auto m = model::LanmsffModel::build(cfg, 1);
  auto r = m.forward(Tensor({1, 1, cfg.input_size, cfg.input_size}));
  c.expect(cfg.fusion_length() == kFusionLength, "config fusion length " + std::to_string(cfg.fusion_length()));
  c.expect(r.fused.dim(1) == kFusionLength, "forward fused width " + std::to_string(r.fused.dim(1)));
  std::string parts;
  for (const auto& d : r.descriptors) parts += (parts.empty() ? "" : "+") + std::to_string(d.dim(1));
  c.note("fused " + std::to_string(r.fused.dim(1)) + " = " + parts);
  return c.outcome();
}

// 2
Outcome parameter_audit() {
  Check c;
  auto a = model::audit_parameters(model::LanmsffModel::build(model::LanmsffConfig{}, 1));
  const double dev = (static_cast<double>(a.grand_total) - kReferenceParameters) / kReferenceParameters;
  c.expect(std::abs(dev) <= kParameterBand, "outside the band");
  c.expect(a.grand_total == kFrozenParameterTotal, "drifted from frozen " + std::to_string(kFrozenParameterTotal));
  c.expect(a.grand_total == oracle::parameter_count(model::LanmsffConfig{}), "differs from the closed-form count");
  c.note("total " + std::to_string(a.grand_total) + ", deviation " + fmt("%+.2f%%", 100 * dev));
  return c.outcome();
}

// 3
Outcome metric_arithmetic() {
  Check c;
  std::size_t n = 0;
  double worst = 0;
  for (const auto* table : {&published::kFer2013Density, &published::kFerPlusDensity})
    for (const auto& r : *table) {
      const double id = eval::truncate_to(eval::information_density(r.accuracy, r.params_k * 1e3), r.decimals);
      worst = std::max(worst, std::abs(id - r.density));
      c.expect(std::abs(id - r.density) <= kPrintedPrecisionTol, "ID " + r.method + " " + fmt("%.4f", id));
      ++n;
    }
  for (const auto* table : {&published::kKdefVariance, &published::kPoseFerPlusVariance, &published::kAblationVariance})
    for (const auto& r : *table) {
      const double v = eval::truncate_to(eval::pose_variance(r.pose_accuracy, r.overall), 2);
      worst = std::max(worst, std::abs(v - r.variance));
      c.expect(std::abs(v - r.variance) <= kPrintedPrecisionTol, "Var " + r.method + " " + fmt("%.4f", v));
      ++n;
    }
  c.note(std::to_string(n) + " published values, worst gap " + fmt("%.3f", worst));
  return c.outcome();
}

// 4
Outcome gradient_suite() {
  Check c;
  std::size_t n = 0, coords = 0, excluded = 0;
  real worst = 0;
  for (const auto& k : gradsuite::all_cases()) {
    const auto r = k.run();
    c.expect(r.pass, k.name + ": " + r.summary());
    worst = std::max(worst, r.max_rel_err);
    coords += r.checked;
    excluded += r.excluded.size();
    ++n;
  }
  c.note(std::to_string(n) + " cases, " + std::to_string(coords) + " coordinates, " + std::to_string(excluded) +
         " excluded, max rel err " + fmt("%.2e", worst));
  return c.outcome();
}

// 5
Outcome pwfs_oracle() {
  Check c;
  Rng rng(5);
  const std::size_t channels[] = {3, 6, 66, 72, 78};
  for (std::size_t i = 0; i < 1000; ++i) {
    const std::size_t ch = channels[i % 5];
    Tensor x = oracle::random_tensor({1 + rng.index(2), ch, 1 + rng.index(5), 1 + rng.index(5)}, rng, -2, 2);
    if (i % 10 == 0)  // duplicated values exercise tie handling
      for (std::size_t j = 0; j + 1 < x.numel(); j += 3) x[j + 1] = x[j];
    c.expect(max_abs_diff(blocks::pwfs(x), oracle::pwfs(x)) == 0, "tensor " + std::to_string(i) + " differs");
  }
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t ch = channels[i % 5];
    Tensor x = oracle::random_tensor({1, ch, 3, 3}, rng, -2, 2);
    const real a = static_cast<real>(rng.uniform(0.1, 10));
    Tensor ax = x.clone();
    for (auto& v : ax.data()) v *= a;
    Tensor y = blocks::pwfs(x), ya = blocks::pwfs(ax);
    for (std::size_t j = 0; j < y.numel(); ++j)
      c.expect(std::abs(ya[j] - a * y[j]) <= kHomogeneityRelTol * std::max<real>(1, std::abs(a * y[j])),
               "homogeneity pair " + std::to_string(i));
    Tensor bigger = x.clone();
    for (auto& v : bigger.data()) v += static_cast<real>(rng.uniform(0, 1));
    Tensor yb = blocks::pwfs(bigger);
    for (std::size_t j = 0; j < y.numel(); ++j) c.expect(yb[j] >= y[j], "monotonicity pair " + std::to_string(i));
  }
  c.note("1000 oracle tensors exact, 100 homogeneity and monotonicity pairs");
  return c.outcome();
}

// 6
Outcome massatt_contract() {
  Check c;
  Rng rng(6);
  struct Geometry {
    std::size_t channels, extent;
  };
  for (const auto g : {Geometry{72, 32}, Geometry{84, 8}}) {
    ParameterList p;
    auto w = blocks::MassAttWeights::create(p, "att", g.channels, rng);
    for (Tensor* b : {&w.b0, &w.b1, &w.b2, &w.b3, &w.b4, &w.b5})
      for (auto& v : b->data()) v = rng.uniform(-0.5, 0.5);
    const oracle::MassAttWeights ow{w.z0, w.b0, w.z1, w.b1, w.z2, w.b2, w.z3, w.b3, w.z4, w.b4, w.z5, w.b5};
    real lo = 1, hi = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      Tensor x = oracle::random_tensor({1, g.channels, g.extent, g.extent}, rng, -3, 3);
      auto t = blocks::mass_att_trace(x, w);
      for (real v : t.attention.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      c.expect(t.spatial_map.shape() == Shape{1, 1, g.extent, g.extent}, "spatial round trip changed the extent");
      if (i < 5) c.expect(max_abs_diff(t.attention, oracle::mass_att(x, ow)) <= kMassAttOracleTol, "oracle mismatch");
    }
    c.expect(lo > 0 && hi < 1, "map left (0,1)");
    c.note(std::to_string(g.channels) + "@" + std::to_string(g.extent) + " range [" + fmt("%.4f", lo) + ", " +
           fmt("%.4f", hi) + "]");

    ParameterList zp;
    auto zw = blocks::MassAttWeights::create(zp, "zero", g.channels, rng);
    for (Tensor* b : {&zw.b0, &zw.b1, &zw.b2, &zw.b3, &zw.b4, &zw.b5})
      for (auto& v : b->data()) v = 0;
    const Tensor half = blocks::mass_att(Tensor({1, g.channels, g.extent, g.extent}), zw);
    for (real v : half.data())
      c.expect(v == real(0.5), "zero input gave " + fmt("%.17g", v));
  }
  return c.outcome();
}

// 7
Outcome conv_oracles() {
  Check c;
  Rng rng(7);
  real worst = 0;
  auto compare = [&](const char* name, const Tensor& got, const Tensor& want) {
    const real d = max_abs_diff(got, want);
    worst = std::max(worst, d);
    c.expect(d <= kConvOracleTol, std::string(name) + " " + fmt("%.2e", d));
  };
  for (int rep = 0; rep < 5; ++rep) {
    {
      const auto s = conv_spec(3, 4, 1, 1, true);
      Tensor x = oracle::random_tensor({2, 3, 6, 7}, rng), w = oracle::random_tensor(s.weight_shape(), rng),
             b = oracle::random_tensor({4}, rng);
      compare("standard", nn::conv2d(x, s, w, b), oracle::conv2d(x, w, &b, 1, 1, 1));
    }
    {
      const auto s = conv_spec(2, 3, 2, 1, false);
      Tensor x = oracle::random_tensor({1, 2, 9, 8}, rng), w = oracle::random_tensor(s.weight_shape(), rng);
      compare("dilated", nn::conv2d(x, s, w), oracle::conv2d(x, w, nullptr, 1, 2, 1));
    }
    {
      const auto s = conv_spec(4, 6, 1, 2, true);
      Tensor x = oracle::random_tensor({2, 4, 5, 5}, rng), w = oracle::random_tensor(s.weight_shape(), rng),
             b = oracle::random_tensor({6}, rng);
      compare("grouped", nn::conv2d(x, s, w, b), oracle::conv2d(x, w, &b, 1, 1, 2));
    }
    for (std::size_t dil : {1, 2}) {
      nn::DwsSpec s;
      s.in_channels = 6;
      s.out_channels = 4;
      s.dilation = {dil, dil};
      nn::DwsWeights w;
      w.depthwise = oracle::random_tensor(s.depthwise().weight_shape(), rng);
      w.pointwise = oracle::random_tensor(s.pointwise().weight_shape(), rng);
      w.pointwise_bias = oracle::random_tensor({4}, rng);
      Tensor x = oracle::random_tensor({2, 6, 7, 6}, rng);
      Tensor mid = oracle::conv2d(x, w.depthwise, nullptr, 1, dil, 6);
      compare("depthwise-separable", nn::dws_conv(x, s, w), oracle::conv2d(mid, w.pointwise, &w.pointwise_bias, 1, 1, 1));
    }
    {
      nn::TransposedConvSpec s{2, 3, {3, 3}, {2, 2}, true};
      Tensor x = oracle::random_tensor({2, 2, 4, 5}, rng), w = oracle::random_tensor(s.weight_shape(), rng),
             b = oracle::random_tensor({3}, rng);
      compare("transposed", nn::transposed_conv2d(x, s, w, b, 8, 10), oracle::transposed_conv2d(x, w, &b, 2, 8, 10));
    }
  }
  Tensor impulse({1, 1, 11, 11});
  impulse.at(0, 0, 5, 5) = 1;
  Tensor y = nn::conv2d(impulse, conv_spec(1, 1, 2, 1, false), Tensor({1, 1, 3, 3}, real(1)));
  std::size_t r0 = 99, r1 = 0, c0 = 99, c1 = 0;
  for (std::size_t r = 0; r < 11; ++r)
    for (std::size_t q = 0; q < 11; ++q)
      if (y.at(0, 0, r, q) != 0) r0 = std::min(r0, r), r1 = std::max(r1, r), c0 = std::min(c0, q), c1 = std::max(c1, q);
  c.expect(r1 - r0 + 1 == 5 && c1 - c0 + 1 == 5, "dilation-2 footprint is not 5x5");
  c.note("worst oracle gap " + fmt("%.2e", worst) + ", dilation-2 footprint " + std::to_string(r1 - r0 + 1) + "x" +
         std::to_string(c1 - c0 + 1));
  return c.outcome();
}

// 8
Outcome overfit() {
  Check c;
  auto cfg = model::LanmsffConfig::miniature(7);
  cfg.dropout_rate = 0;
  auto m = model::LanmsffModel::build(cfg, 7);
  data::Dataset d;
  Rng rng(11);
  for (int i = 0; i < 64; ++i) {
    data::Sample s;
    s.size = cfg.input_size;
    s.image.resize(s.size * s.size);
    for (auto& v : s.image) v = static_cast<real>(rng.uniform());
    s.label = static_cast<int>(rng.index(7));
    s.source_id = "noise" + std::to_string(i);
    d.push_back(std::move(s));
  }
  train::TrainConfig tc;
  tc.max_epochs = kOverfitEpochs;
  tc.batch_size = 32;
  tc.lr0 = 1e-3;
  tc.patience_epochs = 8;
  tc.seed = 3;
  // The training set doubles as the validation set, scored in eval mode.
  const auto r = train::fit(m, d, d, tc);
  std::size_t first = 0;
  double best = 0;
  for (const auto& e : r.log.epochs) {
    best = std::max<double>(best, e.val_acc);
    if (!first && e.val_acc >= kOverfitTarget) first = e.epoch;
  }
  c.expect(first != 0, "never reached " + fmt("%.0f%%", kOverfitTarget));
  c.note(std::to_string(m.parameters().count()) + " parameters, " + fmt("%.1f%%", best) + " best, " +
         (first ? "reached at epoch " + std::to_string(first) : std::string("not reached")));
  return c.outcome();
}

// 9
Outcome ablations() {
  Check c;
  data::SyntheticOptions o;
  o.count = 128;
  o.seed = 9;
  const auto train_set = data::synthetic_dataset(o).samples;
  o.count = 16;
  o.seed = 10;
  o.split = data::Split::Val;
  const auto val_set = data::synthetic_dataset(o).samples;
  struct Variant {
    const char* name;
    bool massatt, pwfs;
    std::size_t params = 0, massatt_total = 0;
  };
  Variant v[4] = {{"full", true, true}, {"no-PWFS", true, false}, {"no-MassAtt", false, true}, {"no-both", false, false}};
  for (auto& x : v) {
    model::LanmsffConfig cfg;
    cfg.enable_massatt = x.massatt;
    cfg.enable_pwfs = x.pwfs;
    auto m = model::LanmsffModel::build(cfg, 1);
    const auto a = model::audit_parameters(m);
    x.params = a.grand_total;
    x.massatt_total = a.massatt_total();
    train::TrainConfig tc;
    tc.max_epochs = 1;
    tc.batch_size = 32;
    const auto r = train::fit(m, train_set, val_set, tc);
    c.expect(r.log.epochs.size() == 1 && std::isfinite(r.log.epochs[0].train_loss), std::string(x.name) + " did not train");
    c.note(std::string(x.name) + " " + std::to_string(x.params));
  }
  const auto& [full, nopw, noatt, none] = v;
  c.expect(nopw.params > full.params, "no-PWFS not above full");
  c.expect(full.params > noatt.params && full.params > none.params, "full not above the no-MassAtt variants");
  c.expect(none.params != noatt.params, "no-MassAtt variants coincide");
  const std::size_t classifier_delta = (300 - kFusionLength) * 7;
  c.expect(nopw.params - full.params == classifier_delta, "no-PWFS delta is not the wider classifier");
  c.expect(full.params - noatt.params == full.massatt_total, "no-MassAtt delta is not the attention total");
  c.expect(none.params - noatt.params == classifier_delta, "no-both delta is not the wider classifier");
  return c.outcome();
}

// 10
Outcome data_pipeline() {
  Check c;
  const auto d = data::parse_fer2013_file(std::string(LANMSFF_FIXTURE_DIR) + "/fer2013_fixture.csv");
  const auto counts = data::split_counts(d);
  c.expect(d.size() == 50 && counts.train == 30 && counts.val == 10 && counts.test == 10, "fixture split counts");
  real lo = 1, hi = 0;
  for (const auto& s : d) {
    c.expect(s.image.size() == 64 * 64, "fixture image not 64x64");
    for (real x : s.image) lo = std::min(lo, x), hi = std::max(hi, x);
  }
  c.expect(lo == 0 && hi == 1, "normalized range " + fmt("%.3f", lo) + ".." + fmt("%.3f", hi));
  const auto train_rows = data::filter_split(d, data::Split::Train);
  const auto augmented = train::augment_dataset(train_rows, 1);
  c.expect(augmented.size() == 4 * train_rows.size(), "augmentation gave " + std::to_string(augmented.size()));
  for (const auto& s : augmented)
    for (real x : s.image) c.expect(x >= 0 && x <= 1, "augmented pixel outside [0,1]");
  c.note("fixture 50 rows in [0,1], augmentation " + std::to_string(train_rows.size()) + " -> " +
         std::to_string(augmented.size()));

  const char* path = std::getenv("LANMSFF_FER2013_CSV");
  if (!path || !*path || !fs::exists(path)) {
    c.note("real FER-2013 CSV skipped (set LANMSFF_FER2013_CSV)");
    return c.outcome();
  }
  const auto full = data::parse_fer2013_file(path, 48);
  const auto fc = data::split_counts(full);
  c.expect(full.size() == 35887, "total " + std::to_string(full.size()));
  c.expect(fc.train == 28709, "train " + std::to_string(fc.train));
  c.expect(data::class_counts(full, 7) == std::vector<std::size_t>{4953, 547, 5121, 8989, 6077, 4002, 6198},
           "per-class counts");
  c.note("real CSV " + std::to_string(full.size()) + " rows, train " + std::to_string(fc.train));
  return c.outcome();
}

// 11
/// Every file under `root` with occurrences of the root path itself
/// replaced, so run directories do not count as differences.
std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::string bytes(std::istreambuf_iterator<char>(f), {});
    const std::string needle = root.string();
    for (auto at = bytes.find(needle); at != std::string::npos; at = bytes.find(needle, at))
      bytes.replace(at, needle.size(), "<run>");
    files.emplace_back(fs::relative(e.path(), root).string(), std::move(bytes));
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism() {
  Check c;
  const std::vector<std::string> model_flags{"--classes", "3", "--input-size", "32", "--synthetic-count", "48"};
  std::vector<std::vector<std::pair<std::string, std::string>>> trees;
  const fs::path base = fs::temp_directory_path() / "lanmsff_acceptance_determinism";
  for (int run = 0; run < 2; ++run) {
    const fs::path root = base / ("run" + std::to_string(run));
    fs::remove_all(root);
    const std::string weights = (root / "train" / "weights.lnmf").string();
    const std::vector<std::vector<std::string>> steps{
        {"--out", (root / "train").string(), "--seed", "11", "train", "--epochs", "3", "--batch-size", "16"},
        {"--out", (root / "eval").string(), "--seed", "11", "eval", "--weights", weights},
        {"--out", (root / "cam").string(), "--seed", "11", "gradcam", "--weights", weights, "--count", "3"}};
    for (auto args : steps) {
      args.insert(args.end(), model_flags.begin(), model_flags.end());
      args.insert(args.begin(), "lanmsff");
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
      c.expect(code == 0, args[5] + " exited " + std::to_string(code) + ": " + err.str());
    }
    trees.push_back(read_tree(root));
  }
  c.expect(!trees[0].empty(), "no outputs");
  c.expect(trees[0].size() == trees[1].size(), "different file sets");
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < std::min(trees[0].size(), trees[1].size()); ++i) {
    c.expect(trees[0][i].first == trees[1][i].first, "file set differs at " + trees[0][i].first);
    c.expect(trees[0][i].second == trees[1][i].second, trees[0][i].first + " differs");
    bytes += trees[0][i].second.size();
  }
  c.note(std::to_string(trees[0].size()) + " files, " + std::to_string(bytes) + " bytes compared");
  fs::remove_all(base);
  return c.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "fusion-vector length", 1, fusion_length},
      {2, "parameter audit", 1, parameter_audit},
      {3, "metric arithmetic", 1, metric_arithmetic},
      {4, "gradient correctness", 120, gradient_suite},
      {5, "PWFS oracle equivalence", 30, pwfs_oracle},
      {6, "MassAtt contract", 30, massatt_contract},
      {7, "convolution oracles", 60, conv_oracles},
      {8, "overfit sanity", 600, overfit},
      {9, "ablation configurations", 300, ablations},
      {10, "data pipeline", 30, data_pipeline},
      {11, "determinism", 300, determinism},
  };
  int failed = 0;
  for (const auto& k : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = k.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > k.budget_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", k.budget_s);
    }
    failed += !o.pass;
    std::printf("Criterion %d (%s): %s [%.1f s] %s\n", k.id, k.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
