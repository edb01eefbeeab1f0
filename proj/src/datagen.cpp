#include "sglayout/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sglayout/errors.hpp"
#include "sglayout/serialize.hpp"

namespace sglayout {

namespace {

void check_config(const SceneGenConfig& cfg) {
  if (cfg.category_priors.empty())
    throw ConfigError("datagen: no category priors");
  if (cfg.min_objects > cfg.max_objects || cfg.min_objects < 1)
    throw ConfigError("datagen: bad object count range");
  if (cfg.mask_side < 1) throw ConfigError("datagen: mask_side must be >= 1");
  if (cfg.max_attempts < 1)
    throw ConfigError("datagen: max_attempts must be >= 1");
}

MaskGrid make_mask(MaskShape shape, int side) {
  if (shape == MaskShape::Rectangle) return MaskGrid::filled(side, 1);
  MaskGrid m = MaskGrid::filled(side, 0);
  // Inscribed ellipse, cell-center membership.
  for (int r = 0; r < side; ++r) {
    const double v = ((r + 0.5) / side - 0.5) / 0.5;
    for (int c = 0; c < side; ++c) {
      const double u = ((c + 0.5) / side - 0.5) / 0.5;
      if (u * u + v * v <= 1.0) m.at(r, c) = 1;
    }
  }
  if (m.foreground_count() == 0) m.at(side / 2, side / 2) = 1;
  return m;
}

double clamp(double x, double lo, double hi) {
  return std::min(hi, std::max(lo, x));
}

}  // namespace

Scene generate_scene(Rng& rng, const SceneGenConfig& cfg) {
  check_config(cfg);
  const int n_categories = static_cast<int>(cfg.category_priors.size());
  const int span = cfg.max_objects - cfg.min_objects + 1;
  const int n_objects =
      cfg.min_objects + static_cast<int>(rng.uniform_below(span));

  // Cycle through a per-scene shuffled category order: scenes stay diverse
  // and a scene with n_objects == n_categories covers every category.
  std::vector<int> order(n_categories);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  Scene scene;
  scene.objects.reserve(n_objects);
  for (int k = 0; k < n_objects; ++k) {
    const int category = order[k % n_categories];
    const auto& prior = cfg.category_priors[category];
    bool placed = false;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
      const double w = clamp(rng.normal(prior.size_mean, prior.size_sigma), 0.04, 0.98);
      const double h = clamp(rng.normal(prior.size_mean, prior.size_sigma), 0.04, 0.98);
      if (w * h < cfg.min_area) continue;
      const double cx = rng.uniform(w / 2.0, 1.0 - w / 2.0);
      const double cy =
          clamp(rng.normal(prior.band_mean, prior.band_sigma), h / 2.0, 1.0 - h / 2.0);
      const Box box{cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0};
      if (!box.valid() || box_area(box) < cfg.min_area) continue;
      scene.objects.push_back(
          {category, box, make_mask(prior.mask_shape, cfg.mask_side)});
      placed = true;
      break;
    }
    if (!placed)
      throw NumericalError(
          "datagen: could not place object of category " +
          std::to_string(category) + " after " +
          std::to_string(cfg.max_attempts) + " attempts");
  }
  return scene;
}

std::vector<Scene> generate_dataset(const SceneGenConfig& cfg) {
  check_config(cfg);
  std::vector<Scene> scenes;
  scenes.reserve(cfg.n_scenes);
  for (int i = 0; i < cfg.n_scenes; ++i) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    try {
      scenes.push_back(generate_scene(rng, cfg));
    } catch (const NumericalError& e) {
      throw NumericalError("scene " + std::to_string(i) + ": " + e.what());
    }
  }
  return scenes;
}

LoadReport load_scenes(const std::filesystem::path& path, const Vocab& vocab) {
  const auto doc = read_json_file(path);
  auto raw = scenes_from_json(doc, vocab);

  LoadReport report;
  for (auto& scene : raw) {
    Scene kept;
    for (auto& obj : scene.objects) {
      if (box_area(obj.box) < 0.02) {
        ++report.dropped_objects;
        continue;
      }
      kept.objects.push_back(std::move(obj));
    }
    const int n = static_cast<int>(kept.objects.size());
    if (n < 3 || n > 8) {
      ++report.discarded_scenes;
      continue;
    }
    validate_scene(kept, static_cast<int>(vocab.object_categories.size()));
    report.scenes.push_back(std::move(kept));
  }
  return report;
}

void save_scenes(const std::vector<Scene>& scenes, const Vocab& vocab,
                 const std::filesystem::path& path) {
  write_json_file(scenes_to_json(scenes, vocab), path);
}

}  // namespace sglayout
