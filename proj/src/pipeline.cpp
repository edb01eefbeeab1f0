#include "sglayout/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sglayout/errors.hpp"
#include "sglayout/rng.hpp"

namespace sglayout {

namespace {

// Seed keys for the derived streams.
constexpr std::uint64_t kGenKey = 1;
constexpr std::uint64_t kInitKey = 2;
constexpr std::uint64_t kTrainKey = 3;
constexpr std::uint64_t kGraphKey = 4;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    return std::stoi(v);
  } catch (...) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return std::stod(v);
  } catch (...) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    return std::stoull(v);
  } catch (...) {
    throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" +
                      v + "'");
  }
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "variant") {
    if (value != "baseline" && value != "triplet" && value != "triplet_da")
      throw ConfigError("config: unknown variant '" + value + "'");
    cfg.variant = value;
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "categories") {
    cfg.categories = split(value, ',');
    if (cfg.categories.empty())
      throw ConfigError("config: categories list is empty");
  } else if (key.starts_with("prior.")) {
    const auto parts = split(key, '.');
    if (parts.size() != 3)
      throw ConfigError("config: bad prior key '" + key + "'");
    CategoryPrior& p = cfg.priors[parts[1]];
    if (parts[2] == "band_mean") p.band_mean = to_double(key, value);
    else if (parts[2] == "band_sigma") p.band_sigma = to_double(key, value);
    else if (parts[2] == "size_mean") p.size_mean = to_double(key, value);
    else if (parts[2] == "size_sigma") p.size_sigma = to_double(key, value);
    else if (parts[2] == "mask_shape") {
      if (value == "rectangle") p.mask_shape = MaskShape::Rectangle;
      else if (value == "ellipse") p.mask_shape = MaskShape::Ellipse;
      else throw ConfigError("config: unknown mask_shape '" + value + "'");
    } else {
      throw ConfigError("config: unknown prior field '" + parts[2] + "'");
    }
  } else if (key == "gen.n_scenes") {
    cfg.n_scenes = to_int(key, value);
  } else if (key == "gen.min_objects") {
    cfg.min_objects = to_int(key, value);
  } else if (key == "gen.max_objects") {
    cfg.max_objects = to_int(key, value);
  } else if (key == "gen.min_area") {
    cfg.min_area = to_double(key, value);
  } else if (key == "gen.mask_side") {
    cfg.mask_side = to_int(key, value);
  } else if (key == "gen.max_attempts") {
    cfg.max_attempts = to_int(key, value);
  } else if (key == "graph.edges_per_node") {
    cfg.edges_per_node = to_int(key, value);
  } else if (key == "aug.overlap_threshold") {
    cfg.augment.overlap_threshold = to_double(key, value);
  } else if (key == "aug.max_augmented") {
    cfg.augment.max_augmented = to_int(key, value);
  } else if (key == "gcn.embed_dim") {
    cfg.gcn.embed_dim = to_int(key, value);
  } else if (key == "gcn.hidden_dim") {
    cfg.gcn.hidden_dim = to_int(key, value);
  } else if (key == "gcn.n_layers") {
    cfg.gcn.n_layers = to_int(key, value);
  } else if (key == "gcn.init_scale") {
    cfg.gcn.init_scale = to_double(key, value);
  } else if (key == "heads.object_mask_side") {
    cfg.heads.object_mask_side = to_int(key, value);
  } else if (key == "heads.triplet_mask_side") {
    cfg.heads.triplet_mask_side = to_int(key, value);
  } else if (key == "train.epochs") {
    cfg.train.epochs = to_int(key, value);
  } else if (key == "train.batch_size") {
    cfg.train.batch_size = to_int(key, value);
  } else if (key == "train.learning_rate") {
    cfg.train.learning_rate = to_double(key, value);
  } else if (key == "train.optimizer") {
    if (value == "sgd") cfg.train.optimizer = TrainConfig::Optimizer::kSgd;
    else if (value == "adam") cfg.train.optimizer = TrainConfig::Optimizer::kAdam;
    else throw ConfigError("config: unknown optimizer '" + value + "'");
  } else if (key == "train.eval_every") {
    cfg.train.eval_every = to_int(key, value);
  } else if (key == "train.threads") {
    cfg.train.n_threads = to_int(key, value);
  } else if (key == "loss.w_box") {
    cfg.train.weights.w_box = to_double(key, value);
  } else if (key == "loss.w_mask") {
    cfg.train.weights.w_mask = to_double(key, value);
  } else if (key == "loss.w_tmask") {
    cfg.train.weights.w_tmask = to_double(key, value);
  } else if (key == "loss.w_superbox") {
    cfg.train.weights.w_superbox = to_double(key, value);
  } else if (key == "probe.c") {
    cfg.probe.C = to_double(key, value);
  } else if (key == "probe.epochs") {
    cfg.probe.epochs = to_int(key, value);
  } else if (key == "probe.test_fraction") {
    cfg.probe.test_fraction = to_double(key, value);
  } else if (key == "probe.split_seed") {
    cfg.probe.split_seed = to_u64(key, value);
  } else if (key == "export.top_k") {
    cfg.export_top_k = to_int(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.categories = {"sky",  "cloud", "mountain", "tree",   "building",
                    "grass", "road",  "car",      "person", "dog"};
  cfg.priors["sky"] = {0.12, 0.06, 0.42, 0.08, MaskShape::Rectangle};
  cfg.priors["cloud"] = {0.16, 0.07, 0.18, 0.04, MaskShape::Ellipse};
  cfg.priors["mountain"] = {0.32, 0.08, 0.34, 0.07, MaskShape::Rectangle};
  cfg.priors["tree"] = {0.45, 0.09, 0.26, 0.06, MaskShape::Ellipse};
  cfg.priors["building"] = {0.42, 0.09, 0.30, 0.07, MaskShape::Rectangle};
  cfg.priors["grass"] = {0.80, 0.06, 0.36, 0.08, MaskShape::Rectangle};
  cfg.priors["road"] = {0.86, 0.05, 0.32, 0.07, MaskShape::Rectangle};
  cfg.priors["car"] = {0.72, 0.06, 0.18, 0.03, MaskShape::Rectangle};
  cfg.priors["person"] = {0.62, 0.08, 0.16, 0.02, MaskShape::Ellipse};
  cfg.priors["dog"] = {0.74, 0.06, 0.15, 0.015, MaskShape::Ellipse};
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text) {
  RunConfig cfg = default_run_config();
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    set_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str());
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& kvs) {
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + kv + "': expected key=value");
    set_key(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
}

void apply_variant(RunConfig& cfg) {
  if (cfg.variant == "baseline") {
    cfg.train.weights.w_tmask = 0.0;
    cfg.train.weights.w_superbox = 0.0;
    cfg.augment.enabled = false;
  } else if (cfg.variant == "triplet" || cfg.variant == "triplet_da") {
    if (cfg.train.weights.w_tmask <= 0.0) cfg.train.weights.w_tmask = 1.0;
    if (cfg.train.weights.w_superbox <= 0.0) cfg.train.weights.w_superbox = 1.0;
    cfg.augment.enabled = cfg.variant == "triplet_da";
  } else {
    throw ConfigError("config: unknown variant '" + cfg.variant + "'");
  }
  cfg.train.augment = cfg.augment;
}

Vocab vocab_from(const RunConfig& cfg) { return Vocab::make(cfg.categories); }

SceneGenConfig make_gen_config(const RunConfig& cfg) {
  SceneGenConfig gen;
  gen.n_scenes = cfg.n_scenes;
  gen.min_objects = cfg.min_objects;
  gen.max_objects = cfg.max_objects;
  gen.min_area = cfg.min_area;
  gen.mask_side = cfg.mask_side;
  gen.max_attempts = cfg.max_attempts;
  gen.seed = mix_seed(cfg.seed, kGenKey);
  gen.category_priors.reserve(cfg.categories.size());
  for (const auto& name : cfg.categories) {
    const auto it = cfg.priors.find(name);
    if (it == cfg.priors.end())
      throw ConfigError("config: no prior for category '" + name + "'");
    gen.category_priors.push_back(it->second);
  }
  return gen;
}

Dataset build_dataset(const RunConfig& cfg, GenStats* stats) {
  Dataset data;
  data.scenes = generate_dataset(make_gen_config(cfg));
  data.graphs.reserve(data.scenes.size());
  const std::uint64_t graph_seed = mix_seed(cfg.seed, kGraphKey);
  GenStats local;
  for (std::size_t i = 0; i < data.scenes.size(); ++i) {
    Rng rng(mix_seed(graph_seed, static_cast<std::uint64_t>(i)));
    SceneGraph g = build_scene_graph(data.scenes[i], rng, cfg.edges_per_node);
    local.n_base_edges += g.n_edges();
    if (cfg.augment.enabled) {
      g = augment_graph(data.scenes[i], g, cfg.augment);
      for (const auto flag : g.augmented)
        if (flag) ++local.n_aug_edges;
    }
    local.n_objects += static_cast<int>(data.scenes[i].objects.size());
    data.graphs.push_back(std::move(g));
  }
  local.n_scenes = static_cast<int>(data.scenes.size());
  if (stats) *stats = local;
  return data;
}

void write_dataset(const Dataset& data, const Vocab& vocab,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  write_json_file(scenes_to_json(data.scenes, vocab), dir / "scenes.json");
  write_json_file(graphs_to_json(data.graphs, vocab), dir / "graphs.json");
}

Dataset load_dataset(const std::filesystem::path& dir, const Vocab& vocab,
                     LoadReport* report) {
  Dataset data;
  LoadReport local = load_scenes(dir / "scenes.json", vocab);
  data.scenes = std::move(local.scenes);
  data.graphs = graphs_from_json(read_json_file(dir / "graphs.json"), vocab);
  if (report) {
    report->dropped_objects = local.dropped_objects;
    report->discarded_scenes = local.discarded_scenes;
  }
  if (data.scenes.size() != data.graphs.size())
    throw DataError("dataset: " + std::to_string(data.scenes.size()) +
                    " scenes vs " + std::to_string(data.graphs.size()) +
                    " graphs after filtering");
  for (std::size_t i = 0; i < data.scenes.size(); ++i) {
    const auto& scene = data.scenes[i];
    const auto& g = data.graphs[i];
    if (g.node_categories.size() != scene.objects.size())
      throw DataError("dataset: graph " + std::to_string(i) +
                      " does not match its scene");
    for (std::size_t k = 0; k < scene.objects.size(); ++k)
      if (g.node_categories[k] != scene.objects[k].category)
        throw DataError("dataset: graph " + std::to_string(i) +
                        " node categories do not match the scene");
  }
  return data;
}

TrainResult run_training(const RunConfig& cfg, const Dataset& data,
                         const Vocab& vocab) {
  TrainConfig train_cfg = cfg.train;
  train_cfg.augment = cfg.augment;
  train_cfg.seed = mix_seed(cfg.seed, kTrainKey);
  GcnConfig gcn_cfg = cfg.gcn;
  gcn_cfg.seed = mix_seed(cfg.seed, kInitKey);
  return train(data.scenes, data.graphs, vocab, gcn_cfg, cfg.heads, train_cfg);
}

MetricsReport run_eval(const ModelParams& params, const Dataset& data,
                       const RunConfig& cfg) {
  return evaluate(data.scenes, data.graphs, params, cfg.augment);
}

ProbeReport run_probe(const ModelParams& params, const Dataset& data,
                      const RunConfig& cfg, const Vocab& vocab,
                      const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string());

  LabelledEmbeddings emb =
      collect_embeddings(data.graphs, params, cfg.variant);
  const ProbeReport report = linear_probe(emb, cfg.probe);
  write_json_file(probe_report_to_json(report, vocab),
                  out_dir / "probe_report.json");

  export_embeddings(emb, vocab, out_dir / "embeddings.csv");
  export_embeddings(emb, vocab, out_dir / "embeddings_top.csv",
                    cfg.export_top_k);

  std::map<int, int> counts;
  for (const int label : emb.labels) ++counts[label];
  const auto means =
      mean_embeddings(emb, static_cast<int>(counts.size()));
  const auto dist = distance_matrix(means);
  std::vector<std::string> names;
  names.reserve(means.size());
  for (const auto& [cls, mean] : means)
    names.push_back(vocab.object_categories.at(cls));
  write_distance_csv(names, dist, out_dir / "distance_heatmap.csv");
  write_json_file(cluster_tree_to_json(agglomerate(dist), names),
                  out_dir / "cluster_tree.json");
  return report;
}

}  // namespace sglayout
