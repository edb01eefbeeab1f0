#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sglayout/graphbuild.hpp"
#include "sglayout/model.hpp"
#include "sglayout/prediction.hpp"

namespace sglayout {

struct TrainConfig {
  enum class Optimizer { kSgd, kAdam };

  int epochs = 200;
  int batch_size = 16;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  LossWeights weights;
  AugmentConfig augment;
  std::uint64_t seed = 1;
  int eval_every = 0;  // 0: never evaluate during training
  int n_threads = 1;   // per-scene batch gradients; reduction order is fixed
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> mean_iou;
  std::optional<double> relation_score;
  std::optional<double> relation_score_base;
};

struct MetricsReport {
  double mean_iou = 0.0;
  // Combined counts base and augmented edges; base-only is reported
  // alongside because augmentation density differs between variants.
  double relation_score = 0.0;
  double relation_score_base = 0.0;
  bool relation_defined = false;
  std::vector<double> per_scene_iou;
  std::vector<double> per_scene_relation;
  std::vector<double> per_scene_relation_base;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> history;
};

struct OptimizerState {
  std::vector<double> m, v;  // Adam moments
  long long t = 0;
};

// One SGD/Adam step in place; state buffers must match values in size.
void optimizer_step(std::vector<double>& values, const std::vector<double>& grad,
                    const TrainConfig& cfg, OptimizerState& state);

// Minibatch gradient descent on the total loss; scenes are shuffled per
// epoch from the seeded RNG and per-scene gradients are reduced in ascending
// batch order, so runs are deterministic given the seed. Throws
// NumericalError with epoch/batch context if the loss goes non-finite.
TrainResult train(const std::vector<Scene>& scenes,
                  const std::vector<SceneGraph>& graphs, const Vocab& vocab,
                  const GcnConfig& gcn_cfg, const HeadConfig& head_cfg,
                  const TrainConfig& cfg);

// Paints thresholded (>= 0.5) object masks into their predicted boxes in
// descending box-area order; returns object indices, -1 for background.
std::vector<int> compose_layout(const LayoutPrediction& pred, int resolution);

double mean_iou(const LayoutPrediction& pred, const Scene& scene);

enum class EdgeFilter { kAll, kBaseOnly };
// Fraction of edges whose predicate rule holds for the predicted boxes.
// Returns nullopt when the filter leaves no edges.
std::optional<double> relation_score(const LayoutPrediction& pred,
                                     const SceneGraph& g,
                                     const AugmentConfig& cfg,
                                     EdgeFilter filter = EdgeFilter::kAll);

MetricsReport evaluate(const std::vector<Scene>& scenes,
                       const std::vector<SceneGraph>& graphs,
                       const ModelParams& params, const AugmentConfig& aug);

}  // namespace sglayout
