#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sglayout/core.hpp"
#include "sglayout/rng.hpp"

namespace sglayout {

enum class MaskShape { Rectangle, Ellipse };

// Spatial prior for one category: a vertical band for the box center and a
// size prior for the box extent.
struct CategoryPrior {
  double band_mean = 0.5;
  double band_sigma = 0.1;
  double size_mean = 0.25;
  double size_sigma = 0.05;
  MaskShape mask_shape = MaskShape::Rectangle;
};

struct SceneGenConfig {
  int n_scenes = 0;
  std::vector<CategoryPrior> category_priors;  // one per vocab category
  int min_objects = 3;
  int max_objects = 8;
  double min_area = 0.02;
  int mask_side = 16;
  int max_attempts = 100;  // rejection cap per object
  std::uint64_t seed = 1;
};

// Throws ConfigError for inconsistent configs, NumericalError when rejection
// sampling exhausts max_attempts (message reports the attempt count).
Scene generate_scene(Rng& rng, const SceneGenConfig& cfg);

// Scene i is drawn from an independent RNG keyed by (seed, i), so scenes are
// reproducible regardless of generation order.
std::vector<Scene> generate_dataset(const SceneGenConfig& cfg);

struct LoadReport {
  std::vector<Scene> scenes;
  int dropped_objects = 0;   // area < 2% of the canvas
  int discarded_scenes = 0;  // object count outside [3, 8] after dropping
};

// Parses the scene JSON schema and applies the ingestion filters.
LoadReport load_scenes(const std::filesystem::path& path, const Vocab& vocab);

void save_scenes(const std::vector<Scene>& scenes, const Vocab& vocab,
                 const std::filesystem::path& path);

}  // namespace sglayout
