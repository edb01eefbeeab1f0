#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sglayout/datagen.hpp"
#include "sglayout/graphbuild.hpp"
#include "sglayout/introspect.hpp"
#include "sglayout/model.hpp"
#include "sglayout/serialize.hpp"
#include "sglayout/training.hpp"

namespace sglayout {

// Everything one experiment needs, parsed from a flat key=value config file.
// The variant presets pin the three model rows: baseline zeroes the triplet
// loss weights and disables augmentation, triplet enables the weights, and
// triplet_da additionally enables depth-edge augmentation.
struct RunConfig {
  std::string variant = "triplet_da";  // baseline | triplet | triplet_da
  std::uint64_t seed = 1;

  std::vector<std::string> categories;
  std::map<std::string, CategoryPrior> priors;  // keyed by category name

  int n_scenes = 200;
  int min_objects = 3;
  int max_objects = 8;
  double min_area = 0.02;
  int mask_side = 16;
  int max_attempts = 100;

  int edges_per_node = 2;
  AugmentConfig augment;

  GcnConfig gcn;
  HeadConfig heads;
  TrainConfig train;

  ProbeConfig probe;
  int export_top_k = 5;
};

RunConfig default_run_config();

// Parses key=value lines ('#' comments) on top of the defaults.
RunConfig parse_run_config_text(const std::string& text);
RunConfig read_run_config(const std::filesystem::path& path);

// --set style "key=value" overrides.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& kvs);

// Enforces the variant invariants on loss weights and augmentation.
void apply_variant(RunConfig& cfg);

Vocab vocab_from(const RunConfig& cfg);
SceneGenConfig make_gen_config(const RunConfig& cfg);

struct Dataset {
  std::vector<Scene> scenes;
  std::vector<SceneGraph> graphs;
};

struct GenStats {
  int n_scenes = 0;
  int n_objects = 0;
  int n_base_edges = 0;
  int n_aug_edges = 0;
};

// Generates scenes, builds base graphs, and augments them when the variant
// enables it. Deterministic in cfg.seed.
Dataset build_dataset(const RunConfig& cfg, GenStats* stats = nullptr);

void write_dataset(const Dataset& data, const Vocab& vocab,
                   const std::filesystem::path& dir);

// Loads scenes.json (ingestion filters applied) and graphs.json; verifies
// the two files stay aligned.
Dataset load_dataset(const std::filesystem::path& dir, const Vocab& vocab,
                     LoadReport* report = nullptr);

TrainResult run_training(const RunConfig& cfg, const Dataset& data,
                         const Vocab& vocab);

MetricsReport run_eval(const ModelParams& params, const Dataset& data,
                       const RunConfig& cfg);

// Writes the five probe artifacts into out_dir: probe_report.json,
// embeddings.csv, embeddings_top.csv, distance_heatmap.csv,
// cluster_tree.json. Returns the probe report.
ProbeReport run_probe(const ModelParams& params, const Dataset& data,
                      const RunConfig& cfg, const Vocab& vocab,
                      const std::filesystem::path& out_dir);

}  // namespace sglayout
