#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sglayout/errors.hpp"
#include "sglayout/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sglayout;

namespace {

// Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical abort, 5 I/O.
constexpr int kOk = 0;
constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;
constexpr int kNumericExit = 4;
constexpr int kIoExit = 5;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string variant;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration file");
  cmd->add_option("--set", args.overrides, "key=value override (repeatable)");
  cmd->add_option("--seed", args.seed, "Override the run seed");
  cmd->add_option("--variant", args.variant,
                  "baseline | triplet | triplet_da");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? default_run_config()
                                           : read_run_config(args.config_path);
  apply_overrides(cfg, args.overrides);
  if (args.seed) cfg.seed = *args.seed;
  if (!args.variant.empty()) {
    if (args.variant != "baseline" && args.variant != "triplet" &&
        args.variant != "triplet_da")
      throw ConfigError("unknown variant '" + args.variant + "'");
    cfg.variant = args.variant;
  }
  apply_variant(cfg);
  return cfg;
}

int cmd_gen(const CommonArgs& args, const std::string& out_dir) {
  const RunConfig cfg = resolve_config(args);
  const Vocab vocab = vocab_from(cfg);
  GenStats stats;
  const Dataset data = build_dataset(cfg, &stats);
  write_dataset(data, vocab, out_dir);
  std::printf("scenes=%d objects=%d base_edges=%d augmented_edges=%d\n",
              stats.n_scenes, stats.n_objects, stats.n_base_edges,
              stats.n_aug_edges);
  std::printf("wrote %s and %s\n", (fs::path(out_dir) / "scenes.json").c_str(),
              (fs::path(out_dir) / "graphs.json").c_str());
  return kOk;
}

int cmd_train(const CommonArgs& args, const std::string& data_dir,
              const std::string& out_dir) {
  const RunConfig cfg = resolve_config(args);
  const Vocab vocab = vocab_from(cfg);
  LoadReport report;
  const Dataset data = load_dataset(data_dir, vocab, &report);
  if (report.dropped_objects || report.discarded_scenes)
    std::printf("ingestion: dropped_objects=%d discarded_scenes=%d\n",
                report.dropped_objects, report.discarded_scenes);

  const TrainResult result = run_training(cfg, data, vocab);
  const int stride = std::max(1, cfg.train.epochs / 10);
  for (const auto& row : result.history) {
    if (row.epoch == 1 || row.epoch == cfg.train.epochs ||
        row.epoch % stride == 0)
      std::printf("epoch %d loss %.6f\n", row.epoch, row.mean_loss);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir);
  write_json_file(checkpoint_to_json(result.params, vocab),
                  fs::path(out_dir) / "checkpoint.json");
  write_history_csv(result.history, fs::path(out_dir) / "history.csv");
  std::printf("wrote %s\n", (fs::path(out_dir) / "checkpoint.json").c_str());
  return kOk;
}

int cmd_eval(const CommonArgs& args, const std::string& ckpt_path,
             const std::string& data_dir, const std::string& out_path) {
  const RunConfig cfg = resolve_config(args);
  Vocab vocab;  // the checkpoint's vocab governs evaluation
  const ModelParams params =
      checkpoint_from_json(read_json_file(ckpt_path), vocab);
  const Dataset data = load_dataset(data_dir, vocab);
  const MetricsReport report = run_eval(params, data, cfg);
  write_json_file(metrics_to_json(report), out_path);
  if (report.relation_defined)
    std::printf("mean_iou=%.4f relation_score=%.4f relation_score_base=%.4f\n",
                report.mean_iou, report.relation_score,
                report.relation_score_base);
  else
    std::printf("mean_iou=%.4f relation_score=undefined\n", report.mean_iou);
  return kOk;
}

int cmd_probe(const CommonArgs& args, const std::string& ckpt_path,
              const std::string& data_dir, const std::string& out_dir) {
  const RunConfig cfg = resolve_config(args);
  Vocab vocab;
  const ModelParams params =
      checkpoint_from_json(read_json_file(ckpt_path), vocab);
  const Dataset data = load_dataset(data_dir, vocab);
  const ProbeReport report = run_probe(params, data, cfg, vocab, out_dir);
  std::printf("probe mean_accuracy=%.4f classes=%zu excluded=%zu\n",
              report.mean_accuracy, report.per_class_accuracy.size(),
              report.excluded_classes.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-graph layout pipeline"};
  app.require_subcommand(1);

  CommonArgs gen_args, train_args, eval_args, probe_args;
  std::string gen_out, train_data, train_out, eval_ckpt, eval_data, eval_out,
      probe_ckpt, probe_data, probe_out;

  auto* gen = app.add_subcommand("gen", "Generate scenes and scene graphs");
  add_common(gen, gen_args);
  gen->add_option("--out", gen_out, "Output directory")
      ->envname("SGLAYOUT_DATA_DIR")
      ->required();

  auto* train = app.add_subcommand("train", "Train a layout model");
  add_common(train, train_args);
  train->add_option("--data", train_data, "Dataset directory")
      ->envname("SGLAYOUT_DATA_DIR")
      ->required();
  train->add_option("--out", train_out, "Checkpoint directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval, eval_args);
  eval->add_option("--ckpt", eval_ckpt, "Checkpoint file")->required();
  eval->add_option("--data", eval_data, "Dataset directory")
      ->envname("SGLAYOUT_DATA_DIR")
      ->required();
  eval->add_option("--out", eval_out, "Metrics JSON path")->required();

  auto* probe = app.add_subcommand("probe", "Probe embedding separability");
  add_common(probe, probe_args);
  probe->add_option("--ckpt", probe_ckpt, "Checkpoint file")->required();
  probe->add_option("--data", probe_data, "Dataset directory")
      ->envname("SGLAYOUT_DATA_DIR")
      ->required();
  probe->add_option("--out", probe_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigExit;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args, gen_out);
    if (train->parsed()) return cmd_train(train_args, train_data, train_out);
    if (eval->parsed()) return cmd_eval(eval_args, eval_ckpt, eval_data, eval_out);
    if (probe->parsed())
      return cmd_probe(probe_args, probe_ckpt, probe_data, probe_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataExit;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kNumericExit;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
