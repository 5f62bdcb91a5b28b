#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lanmsff/lanmsff.hpp"

namespace lanmsff::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kRuntime = 4 };

/// Error carrying the process exit code it maps to.
class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct ModelArgs {
  std::size_t classes = 7;
  std::size_t input_channels = 1;
  std::size_t input_size = 64;
  std::vector<std::size_t> widths;
  bool no_pwfs = false;
  bool no_massatt = false;
  bool independent_paths = false;
  double dropout = 0.25;
  std::string config_file;

  model::LanmsffConfig resolve() const {
    model::LanmsffConfig c;
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) throw CommandError(kUsage, "cannot open model config " + config_file);
      try {
        c = model::config_from_json(nlohmann::json::parse(f));
      } catch (const nlohmann::json::exception& e) {
        throw CommandError(kUsage, "malformed model config " + config_file + ": " + e.what());
      }
      return c;
    }
    c.num_classes = classes;
    c.input_channels = input_channels;
    c.input_size = input_size;
    if (!widths.empty()) {
      if (widths.size() != 4) throw CommandError(kUsage, "--widths needs exactly four values");
      std::copy(widths.begin(), widths.end(), c.block_widths.begin());
    }
    c.enable_pwfs = !no_pwfs;
    c.enable_massatt = !no_massatt;
    c.wiring = independent_paths ? blocks::PathWiring::Independent : blocks::PathWiring::CrossPathSharing;
    c.dropout_rate = static_cast<real>(dropout);
    return c;
  }

  void attach(CLI::App* app) {
    app->add_option("--classes", classes, "Number of output classes")->check(CLI::Range(2, 1000));
    app->add_option("--input-channels", input_channels, "1 (grayscale) or 3 (RGB)")->check(CLI::IsMember({1, 3}));
    app->add_option("--input-size", input_size, "Input edge length, a multiple of 32");
    app->add_option("--widths", widths, "Four block widths")->delimiter(',');
    app->add_flag("--no-pwfs", no_pwfs, "Disable point-wise feature selection");
    app->add_flag("--no-massatt", no_massatt, "Disable mass attention");
    app->add_flag("--independent-paths", independent_paths, "Dual-path blocks without cross-path sharing");
    app->add_option("--dropout", dropout, "Dropout rate")->check(CLI::Range(0.0, 0.99));
    app->add_option("--model-config", config_file, "Model config JSON (overrides the model flags)");
  }
};

struct DataArgs {
  std::string kind = "synthetic";
  std::string path;
  std::string fer2013;
  std::string pose_index30, pose_index45;
  std::size_t synthetic_count = 128;
  std::uint64_t synthetic_seed = 1;
  std::size_t fold = 0;
  std::size_t folds = 5;
  bool actor_disjoint = false;

  void attach(CLI::App* app, bool with_folds) {
    app->add_option("--dataset", kind, "fer2013 | ferplus | kdef | cache | synthetic")
        ->check(CLI::IsMember({"fer2013", "ferplus", "kdef", "cache", "synthetic"}));
    app->add_option("--data", path, "FER-2013 CSV, FERPlus vote CSV, KDEF directory or sample cache");
    app->add_option("--fer2013", fer2013, "FER-2013 CSV supplying images for --dataset ferplus");
    app->add_option("--synthetic-count", synthetic_count, "Training samples in the synthetic set");
    app->add_option("--synthetic-seed", synthetic_seed, "Seed of the synthetic set");
    app->add_option("--pose-index30", pose_index30, "Ids of samples posed beyond 30 degrees");
    app->add_option("--pose-index45", pose_index45, "Ids of samples posed beyond 45 degrees");
    if (with_folds) {
      app->add_option("--fold", fold, "Validation fold for datasets without splits");
      app->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 100));
      app->add_flag("--actor-disjoint", actor_disjoint, "Keep each KDEF actor inside one fold");
    }
  }

  nlohmann::json to_json() const {
    return {{"kind", kind},          {"data", path},   {"fer2013", fer2013},
            {"synthetic_count", synthetic_count},     {"synthetic_seed", synthetic_seed},
            {"fold", fold},          {"folds", folds}, {"actor_disjoint", actor_disjoint}};
  }
};

struct LoadedData {
  data::Dataset samples;
  data::LabelSchema schema;
  std::vector<std::string> groups;  // KDEF actor keys
  std::vector<std::string> notes;
};

inline data::LabelSchema generic_schema(std::size_t classes) {
  if (classes == 7) return data::fer2013_schema();
  if (classes == 8) return data::ferplus_schema();
  data::LabelSchema s{"synthetic", {}};
  for (std::size_t i = 0; i < classes; ++i) s.classes.push_back("class" + std::to_string(i));
  return s;
}

inline LoadedData load_data(const DataArgs& a, const model::LanmsffConfig& cfg) {
  LoadedData d;
  auto need_path = [&](const std::string& p, const char* flag) {
    if (p.empty()) throw CommandError(kUsage, std::string("--dataset ") + a.kind + " needs " + flag);
    if (!fs::exists(p)) throw CommandError(kData, std::string("dataset path not found: ") + p);
  };
  try {
    if (a.kind == "synthetic") {
      data::SyntheticOptions o;
      o.classes = cfg.num_classes;
      o.size = cfg.input_size;
      o.channels = cfg.input_channels;
      o.seed = a.synthetic_seed;
      o.count = a.synthetic_count;
      d.samples = data::synthetic_dataset(o).samples;
      for (auto [split, prefix, salt] : {std::tuple{data::Split::Val, "synval", 1}, {data::Split::Test, "syntest", 2}}) {
        o.count = std::max<std::size_t>(a.synthetic_count / 4, cfg.num_classes);
        o.seed = mix_seed(a.synthetic_seed, static_cast<std::uint64_t>(salt));
        o.split = split;
        o.prefix = prefix;
        for (auto& s : data::synthetic_dataset(o).samples) d.samples.push_back(std::move(s));
      }
      d.schema = generic_schema(cfg.num_classes);
    } else if (a.kind == "fer2013") {
      need_path(a.path, "--data <fer2013.csv>");
      d.samples = data::parse_fer2013_file(a.path, cfg.input_size);
      d.schema = data::fer2013_schema();
    } else if (a.kind == "ferplus") {
      need_path(a.path, "--data <votes.csv>");
      need_path(a.fer2013, "--fer2013 <fer2013.csv>");
      const auto images = data::parse_fer2013_file(a.fer2013, cfg.input_size);
      std::ifstream votes(a.path);
      auto r = data::parse_ferplus(votes, images);
      d.samples = std::move(r.samples);
      d.notes.push_back("discarded " + std::to_string(r.discarded) + " FERPlus rows without an emotion majority");
      d.schema = data::ferplus_schema();
    } else if (a.kind == "kdef") {
      need_path(a.path, "--data <kdef dir>");
      auto r = data::parse_kdef(a.path, cfg.input_size, cfg.input_channels);
      d.samples = std::move(r.samples);
      d.groups = std::move(r.actor_keys);
      for (const auto& s : r.skipped) d.notes.push_back("skipped " + s);
      d.schema = data::kdef_schema();
    } else {
      need_path(a.path, "--data <cache file>");
      d.samples = data::load_cache(a.path);
      d.schema = generic_schema(cfg.num_classes);
    }
  } catch (const Error& e) {
    throw CommandError(kData, e.what());
  }
  if (d.samples.empty()) throw CommandError(kData, "dataset " + a.kind + " produced no samples");
  const auto& s0 = d.samples.front();
  if (s0.size != cfg.input_size || s0.channels != cfg.input_channels)
    throw CommandError(kData, "samples are " + std::to_string(s0.channels) + "x" + std::to_string(s0.size) + "x" +
                                  std::to_string(s0.size) + " but the model expects " +
                                  std::to_string(cfg.input_channels) + "x" + std::to_string(cfg.input_size) + "x" +
                                  std::to_string(cfg.input_size));
  if (d.schema.size() != cfg.num_classes)
    throw CommandError(kUsage, "dataset " + a.kind + " has " + std::to_string(d.schema.size()) +
                                   " classes; pass --classes " + std::to_string(d.schema.size()));
  return d;
}

/// Train/validation partition: split tags when the data has both, else the
/// requested k-fold split.
inline std::pair<data::Dataset, data::Dataset> train_val(const LoadedData& d, const DataArgs& a, std::uint64_t seed) {
  auto train = data::filter_split(d.samples, data::Split::Train);
  auto val = data::filter_split(d.samples, data::Split::Val);
  if (val.empty()) val = data::filter_split(d.samples, data::Split::Test);
  if (!train.empty() && !val.empty()) return {train, val};
  if (a.fold >= a.folds) throw CommandError(kUsage, "--fold must be below --folds");
  if (d.samples.size() < a.folds) throw CommandError(kData, "too few samples for the requested folds");
  const auto plan = a.actor_disjoint && !d.groups.empty() ? train::kfold_split_grouped(d.groups, a.folds, seed)
                                                          : train::kfold_split(d.samples.size(), a.folds, seed);
  return {data::select(d.samples, plan.training(a.fold)), data::select(d.samples, plan.validation(a.fold))};
}

inline data::Dataset eval_split(const data::Dataset& all, const std::string& split) {
  if (split == "all") return all;
  const auto s = split == "train" ? data::Split::Train : split == "val" ? data::Split::Val : data::Split::Test;
  auto out = data::filter_split(all, s);
  if (out.empty()) {
    const bool untagged =
        std::all_of(all.begin(), all.end(), [](const data::Sample& x) { return x.split == data::Split::Train; });
    if (untagged) return all;
    throw CommandError(kData, "no samples in split '" + split + "'");
  }
  return out;
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw CommandError(kRuntime, "cannot write " + p.string());
  f << text;
}

inline void write_json(const fs::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

inline std::string default_out_dir() {
  const char* env = std::getenv("LANMSFF_OUT");
  return env && *env ? env : "lanmsff_out";
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  fs::path out_dir;
  std::uint64_t seed = 0;
  std::string command;
  nlohmann::json resolved;

  void prepare() {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw CommandError(kRuntime, "cannot create output directory " + out_dir.string());
    resolved["command"] = command;
    resolved["seed"] = seed;
    write_json(out_dir / "resolved_config.json", resolved);
  }
};

inline model::LanmsffModel load_model(const std::string& path, const model::LanmsffConfig& cfg) {
  if (path.empty()) throw CommandError(kUsage, "--weights is required");
  try {
    return model::load_weights(path, cfg);
  } catch (const Error& e) {
    throw CommandError(kData, std::string("cannot load weights: ") + e.what());
  }
}

inline void cmd_audit(Context& ctx, const model::LanmsffConfig& cfg) {
  ctx.resolved["model"] = model::to_json(cfg);
  ctx.prepare();
  auto m = model::LanmsffModel::build(cfg, ctx.seed);
  const auto report = model::audit_parameters(m);
  write_json(ctx.out_dir / "audit.json", report.to_json());
  write_text(ctx.out_dir / "audit.txt", report.table());
  ctx.out << report.table();
}

inline void cmd_train(Context& ctx, const model::LanmsffConfig& cfg, train::TrainConfig tc, const DataArgs& da,
                      bool augment, bool f32) {
  tc.seed = ctx.seed;
  ctx.resolved["model"] = model::to_json(cfg);
  ctx.resolved["train"] = train::to_json(tc);
  ctx.resolved["train"]["augment"] = augment;
  ctx.resolved["dataset"] = da.to_json();
  ctx.prepare();
  const auto d = load_data(da, cfg);
  for (const auto& n : d.notes) ctx.err << n << "\n";
  auto [train_set, val_set] = train_val(d, da, ctx.seed);
  if (augment) train_set = train::augment_dataset(train_set, mix_seed(ctx.seed, 0xa5));
  ctx.err << "training on " << train_set.size() << " samples, validating on " << val_set.size() << "\n";
  auto m = model::LanmsffModel::build(cfg, ctx.seed);
  train::FitResult r;
  try {
    r = train::fit(m, train_set, val_set, tc, [&](const train::EpochRecord& e) {
      ctx.err << "epoch " << e.epoch << " loss " << e.train_loss << " acc " << e.train_acc << " val_loss "
              << e.val_loss << " val_acc " << e.val_acc << " lr " << e.lr << "\n";
    });
  } catch (const Error& e) {
    throw CommandError(e.kind() == ErrorKind::InvalidArgument ? kData : kRuntime, e.what());
  }
  const auto type = f32 ? model::ElementType::F32 : model::ElementType::F64;
  model::save_weights(m, (ctx.out_dir / "final_weights.lnmf").string(), type);
  m.restore(r.best_weights);
  model::save_weights(m, (ctx.out_dir / "weights.lnmf").string(), type);
  write_text(ctx.out_dir / "train_log.csv", r.log.to_csv());
  write_json(ctx.out_dir / "train_log.json",
             {{"epochs", r.log.to_json()}, {"best_epoch", r.best_epoch}, {"best_val_acc", r.best_val_acc}});
  ctx.out << "best validation accuracy " << r.best_val_acc << " at epoch " << r.best_epoch << "\n";
}

inline void cmd_eval(Context& ctx, const model::LanmsffConfig& cfg, const DataArgs& da, const std::string& weights,
                     const std::string& split) {
  ctx.resolved["model"] = model::to_json(cfg);
  ctx.resolved["dataset"] = da.to_json();
  ctx.resolved["weights"] = weights;
  ctx.resolved["split"] = split;
  ctx.prepare();
  auto m = load_model(weights, cfg);
  const auto d = load_data(da, cfg);
  const auto samples = eval_split(d.samples, split);
  auto res = eval::evaluate(m, samples, d.schema);
  auto metrics = res.report.to_json();

  std::vector<double> subset_acc;
  for (auto [path, deg] : {std::pair{da.pose_index30, 30}, {da.pose_index45, 45}}) {
    if (path.empty()) continue;
    std::vector<std::string> ids;
    try {
      ids = data::read_index_file(path);
    } catch (const Error& e) {
      throw CommandError(kData, e.what());
    }
    const auto sub = data::pose_subset(samples, ids, deg);
    for (const auto& id : sub.missing) ctx.err << "pose index " << path << ": '" << id << "' not found\n";
    if (sub.samples.empty()) continue;
    const auto sr = eval::evaluate(m, sub.samples, d.schema);
    subset_acc.push_back(sr.report.overall_accuracy);
    metrics["pose_subsets"].push_back(
        {{"threshold_deg", deg}, {"count", sub.samples.size()}, {"accuracy", sr.report.overall_accuracy}});
  }
  if (!da.pose_index30.empty() && !da.pose_index45.empty()) {
    try {
      data::check_containment(data::read_index_file(da.pose_index45), data::read_index_file(da.pose_index30), 45, 30);
    } catch (const Error& e) {
      throw CommandError(kData, e.what());
    }
  }
  if (!subset_acc.empty())
    metrics["pose_subset_variance"] = eval::pose_variance(subset_acc, res.report.overall_accuracy);

  write_json(ctx.out_dir / "metrics.json", metrics);
  write_text(ctx.out_dir / "metrics.txt", res.report.table());
  nlohmann::json cj{{"classes", d.schema.classes}, {"overall", res.confusion.to_json()}};
  std::string ct = "overall\n" + res.confusion.table(d.schema.classes);
  for (const auto& [pose, cm] : res.per_pose_confusion) {
    cj["per_pose"][data::pose_str(pose)] = cm.to_json();
    ct += "\npose " + data::pose_str(pose) + "\n" + cm.table(d.schema.classes);
  }
  write_json(ctx.out_dir / "confusion.json", cj);
  write_text(ctx.out_dir / "confusion.txt", ct);
  ctx.out << res.report.table();
}

inline void cmd_gradcam(Context& ctx, const model::LanmsffConfig& cfg, const DataArgs& da, const std::string& weights,
                        const std::string& split, std::size_t count, int target, const std::string& layer) {
  ctx.resolved["model"] = model::to_json(cfg);
  ctx.resolved["dataset"] = da.to_json();
  ctx.resolved["weights"] = weights;
  ctx.resolved["split"] = split;
  ctx.resolved["count"] = count;
  ctx.resolved["target_class"] = target;
  ctx.resolved["layer"] = layer;
  ctx.prepare();
  auto m = load_model(weights, cfg);
  const auto d = load_data(da, cfg);
  const auto samples = eval_split(d.samples, split);
  const auto cam_layer = layer == "post_pool" ? eval::CamLayer::Block4PostPool
                         : layer == "block3"  ? eval::CamLayer::Block3Output
                         : layer == "block2"  ? eval::CamLayer::Block2Output
                                              : eval::CamLayer::Block4PrePool;
  const std::size_t n = std::min(count, samples.size());
  const data::Dataset head(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n));
  const auto preds = model::argmax_rows(train::predict_logits(m, head));
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = target >= 0 ? target : preds[i];
    if (static_cast<std::size_t>(cls) >= cfg.num_classes) throw CommandError(kUsage, "--target-class out of range");
    const auto hm = eval::grad_cam(m, head[i], cls, cam_layer);
    if (hm.zero_gradient) ctx.err << "warning: zero gradient for " << head[i].source_id << "\n";
    eval::write_heatmap(hm, ctx.out_dir / "heatmaps", head[i].source_id, &d.schema);
  }
  ctx.out << "wrote " << n << " heatmaps to " << (ctx.out_dir / "heatmaps").string() << "\n";
}

inline void cmd_metrics(Context& ctx, std::optional<double> acc, std::optional<double> params,
                        const std::vector<double>& pose_acc) {
  if (!acc) throw CommandError(kUsage, "metrics needs --acc");
  if (!params && pose_acc.empty()) throw CommandError(kUsage, "metrics needs --params and/or --pose-acc");
  ctx.resolved["acc"] = *acc;
  if (params) ctx.resolved["params"] = *params;
  ctx.resolved["pose_acc"] = pose_acc;
  ctx.prepare();
  nlohmann::json j{{"accuracy", *acc}};
  char line[128];
  if (params) {
    if (*params <= 0) throw CommandError(kUsage, "--params must be positive");
    const double id = eval::information_density(*acc, *params);
    j["params"] = *params;
    j["information_density"] = id;
    std::snprintf(line, sizeof line, "ID %.2f\n", id);
    ctx.out << line;
  }
  if (!pose_acc.empty()) {
    const double var = eval::pose_variance(pose_acc, *acc);
    j["pose_accuracies"] = pose_acc;
    j["pose_variance"] = var;
    std::snprintf(line, sizeof line, "Var %.2f\n", var);
    ctx.out << line;
  }
  write_json(ctx.out_dir / "metrics.json", j);
}

inline void cmd_prepare(Context& ctx, const model::LanmsffConfig& cfg, const DataArgs& da, std::string output) {
  ctx.resolved["model"] = model::to_json(cfg);
  ctx.resolved["dataset"] = da.to_json();
  ctx.prepare();
  const auto d = load_data(da, cfg);
  for (const auto& n : d.notes) ctx.err << n << "\n";
  if (output.empty()) output = (ctx.out_dir / "samples.lnmc").string();
  data::save_cache(d.samples, output);
  const auto c = data::split_counts(d.samples);
  ctx.out << "cached " << d.samples.size() << " samples (train " << c.train << ", val " << c.val << ", test "
          << c.test << ") to " << output << "\n";
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Lightweight multi-scale facial expression recognition network"};
  app.require_subcommand(1);
  std::string out_dir = default_out_dir();
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "Output directory (default $LANMSFF_OUT or ./lanmsff_out)");
  app.add_option("--seed", seed, "Seed for initialization, shuffling, dropout and augmentation");

  ModelArgs ma;
  DataArgs da;
  train::TrainConfig tc;
  std::string schedule = "patience", weights, split = "test", layer = "pre_pool", cache_out;
  bool augment = false, f32 = false;
  std::size_t cam_count = 4;
  int target = -1;
  std::optional<double> acc, params;
  std::vector<double> pose_acc;

  auto* audit = app.add_subcommand("audit", "Per-layer parameter audit");
  ma.attach(audit);

  auto* trainc = app.add_subcommand("train", "Train and save weights plus the training log");
  ma.attach(trainc);
  da.attach(trainc, true);
  trainc->add_option("--epochs", tc.max_epochs, "Epochs")->check(CLI::PositiveNumber);
  trainc->add_option("--batch-size", tc.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  trainc->add_option("--lr", tc.lr0, "Initial learning rate")->check(CLI::PositiveNumber);
  trainc->add_option("--patience", tc.patience_epochs, "Epochs without improvement before decay")
      ->check(CLI::PositiveNumber);
  trainc->add_option("--decay", tc.decay_factor, "Learning-rate decay factor")->check(CLI::Range(0.0, 1.0));
  trainc->add_option("--schedule", schedule, "patience | fixed")->check(CLI::IsMember({"patience", "fixed"}));
  trainc->add_flag("--augment", augment, "Add crop, rotation and flip variants of every training image");
  trainc->add_flag("--weights-f32", f32, "Store weights as 32-bit floats");

  auto* evalc = app.add_subcommand("eval", "Accuracy, confusion matrices, ID and Var");
  ma.attach(evalc);
  da.attach(evalc, false);
  evalc->add_option("--weights", weights, "Weight file")->required();
  evalc->add_option("--split", split, "train | val | test | all")->check(CLI::IsMember({"train", "val", "test", "all"}));

  auto* camc = app.add_subcommand("gradcam", "Grad-CAM heatmaps");
  ma.attach(camc);
  da.attach(camc, false);
  camc->add_option("--weights", weights, "Weight file")->required();
  camc->add_option("--split", split, "train | val | test | all")->check(CLI::IsMember({"train", "val", "test", "all"}));
  camc->add_option("--count", cam_count, "Number of samples")->check(CLI::PositiveNumber);
  camc->add_option("--target-class", target, "Class to explain (default: predicted class)");
  camc->add_option("--layer", layer, "pre_pool | post_pool | block3 | block2")
      ->check(CLI::IsMember({"pre_pool", "post_pool", "block3", "block2"}));

  auto* metricsc = app.add_subcommand("metrics", "ID and Var from published numbers");
  metricsc->add_option("--acc", acc, "Overall accuracy in percent");
  metricsc->add_option("--params", params, "Parameter count");
  metricsc->add_option("--pose-acc", pose_acc, "Per-pose accuracies in percent")->delimiter(',');

  auto* prep = app.add_subcommand("data-prepare", "Write a normalized binary sample cache");
  ma.attach(prep);
  da.attach(prep, false);
  prep->add_option("--output", cache_out, "Cache path (default <out>/samples.lnmc)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  Context ctx{out, err, fs::path(out_dir), seed, "", {}};
  try {
    auto* sub = app.get_subcommands().front();
    ctx.command = sub->get_name();
    model::LanmsffConfig cfg;
    if (sub != metricsc) {
      cfg = ma.resolve();
      try {
        cfg.validate();
      } catch (const Error& e) {
        throw CommandError(kUsage, e.what());
      }
    }
    tc.schedule = schedule == "fixed" ? train::ScheduleMode::FixedInterval : train::ScheduleMode::Patience;
    if (sub == audit) cmd_audit(ctx, cfg);
    else if (sub == trainc) cmd_train(ctx, cfg, tc, da, augment, f32);
    else if (sub == evalc) cmd_eval(ctx, cfg, da, weights, split);
    else if (sub == camc) cmd_gradcam(ctx, cfg, da, weights, split, cam_count, target, layer);
    else if (sub == metricsc) cmd_metrics(ctx, acc, params, pose_acc);
    else cmd_prepare(ctx, cfg, da, cache_out);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace lanmsff::cli
