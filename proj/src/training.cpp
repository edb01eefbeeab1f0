#include "sglayout/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <thread>

#include "sglayout/errors.hpp"
#include "sglayout/rng.hpp"

namespace sglayout {

namespace {

// Runs fn(i) for i in [0, n); results must be written to per-index slots.
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
  if (n_threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(n_threads, n);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

void optimizer_step(std::vector<double>& values, const std::vector<double>& grad,
                    const TrainConfig& cfg, OptimizerState& state) {
  const double lr = cfg.learning_rate;
  if (cfg.optimizer == TrainConfig::Optimizer::kSgd) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= lr * grad[i];
    return;
  }
  ++state.t;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < values.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mh = state.m[i] / c1;
    const double vh = state.v[i] / c2;
    values[i] -= lr * mh / (std::sqrt(vh) + cfg.adam_eps);
  }
}

TrainResult train(const std::vector<Scene>& scenes,
                  const std::vector<SceneGraph>& graphs, const Vocab& vocab,
                  const GcnConfig& gcn_cfg, const HeadConfig& head_cfg,
                  const TrainConfig& cfg) {
  if (scenes.empty()) throw DataError("train: empty dataset");
  if (scenes.size() != graphs.size())
    throw DataError("train: scenes and graphs misaligned");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.learning_rate < 0.0)
    throw ConfigError("train: bad epochs/batch size/learning rate");

  TrainResult result;
  result.params = init_params(gcn_cfg, head_cfg, vocab);
  const std::size_t n_params = result.params.values.size();
  OptimizerState adam;
  adam.m.assign(n_params, 0.0);
  adam.v.assign(n_params, 0.0);

  const int n = static_cast<int>(scenes.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> grad(n_params);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    int batch_index = 0;
    for (int start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const int count = std::min(cfg.batch_size, n - start);
      std::vector<std::vector<double>> scene_grads(count);
      std::vector<double> scene_losses(count);
      parallel_for(count, cfg.n_threads, [&](int k) {
        const int idx = order[start + k];
        ad::Tape tape(result.params.values);
        const int loss = scene_loss_on_tape(tape, graphs[idx], scenes[idx],
                                            result.params, cfg.weights);
        scene_losses[k] = tape.scalar(loss);
        scene_grads[k].assign(n_params, 0.0);
        tape.backward(loss, scene_grads[k]);
      });

      double batch_loss = 0.0;
      std::fill(grad.begin(), grad.end(), 0.0);
      for (int k = 0; k < count; ++k) {  // ascending order: deterministic
        batch_loss += scene_losses[k];
        for (std::size_t i = 0; i < n_params; ++i) grad[i] += scene_grads[k][i];
      }
      const double inv = 1.0 / static_cast<double>(count);
      for (auto& gi : grad) gi *= inv;
      batch_loss *= inv;
      if (!std::isfinite(batch_loss))
        throw NumericalError("train: non-finite loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index));
      epoch_loss += batch_loss * count;
      optimizer_step(result.params.values, grad, cfg, adam);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = epoch_loss / static_cast<double>(n);
    if (cfg.eval_every > 0 &&
        (epoch % cfg.eval_every == 0 || epoch == cfg.epochs)) {
      const MetricsReport r = evaluate(scenes, graphs, result.params, cfg.augment);
      stats.mean_iou = r.mean_iou;
      if (r.relation_defined) {
        stats.relation_score = r.relation_score;
        stats.relation_score_base = r.relation_score_base;
      }
    }
    result.history.push_back(stats);
  }
  return result;
}

std::vector<int> compose_layout(const LayoutPrediction& pred, int resolution) {
  if (resolution < 1) throw ConfigError("compose_layout: resolution must be >= 1");
  std::vector<int> canvas(static_cast<std::size_t>(resolution) * resolution, -1);

  std::vector<int> order(pred.boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return box_area(pred.boxes[a]) > box_area(pred.boxes[b]);
  });

  const int mo = pred.object_mask_side;
  for (const int obj : order) {
    const Box& box = pred.boxes[obj];
    const auto& probs = pred.mask_probs[obj];
    for (int r = 0; r < resolution; ++r) {
      const double v = (r + 0.5) / resolution;
      if (v < box.y0 || v >= box.y1) continue;
      const int mr =
          std::min(mo - 1, static_cast<int>((v - box.y0) / box.height() * mo));
      for (int c = 0; c < resolution; ++c) {
        const double u = (c + 0.5) / resolution;
        if (u < box.x0 || u >= box.x1) continue;
        const int mc =
            std::min(mo - 1, static_cast<int>((u - box.x0) / box.width() * mo));
        if (probs[static_cast<std::size_t>(mr) * mo + mc] >= 0.5)
          canvas[static_cast<std::size_t>(r) * resolution + c] = obj;
      }
    }
  }
  return canvas;
}

double mean_iou(const LayoutPrediction& pred, const Scene& scene) {
  if (pred.boxes.size() != scene.objects.size())
    throw DataError("mean_iou: prediction not aligned with scene");
  if (scene.objects.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < scene.objects.size(); ++i)
    acc += box_iou(pred.boxes[i], scene.objects[i].box);
  return acc / static_cast<double>(scene.objects.size());
}

std::optional<double> relation_score(const LayoutPrediction& pred,
                                     const SceneGraph& g,
                                     const AugmentConfig& cfg,
                                     EdgeFilter filter) {
  int total = 0, satisfied = 0;
  for (const auto& e : g.edges) {
    if (filter == EdgeFilter::kBaseOnly && e.predicate >= pred::kNumBase)
      continue;
    ++total;
    if (relation_holds(e.predicate, pred.boxes[e.subject], pred.boxes[e.object],
                       cfg))
      ++satisfied;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(satisfied) / static_cast<double>(total);
}

MetricsReport evaluate(const std::vector<Scene>& scenes,
                       const std::vector<SceneGraph>& graphs,
                       const ModelParams& params, const AugmentConfig& aug) {
  if (scenes.empty()) throw DataError("evaluate: empty dataset");
  if (scenes.size() != graphs.size())
    throw DataError("evaluate: scenes and graphs misaligned");

  MetricsReport report;
  double iou_acc = 0.0, rel_acc = 0.0, rel_base_acc = 0.0;
  int rel_scenes = 0, rel_base_scenes = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const LayoutPrediction pred = predict_layout(graphs[i], params);
    const double iou = mean_iou(pred, scenes[i]);
    report.per_scene_iou.push_back(iou);
    iou_acc += iou;

    const auto rel = relation_score(pred, graphs[i], aug, EdgeFilter::kAll);
    const auto rel_base =
        relation_score(pred, graphs[i], aug, EdgeFilter::kBaseOnly);
    report.per_scene_relation.push_back(rel.value_or(-1.0));
    report.per_scene_relation_base.push_back(rel_base.value_or(-1.0));
    if (rel) {
      rel_acc += *rel;
      ++rel_scenes;
    }
    if (rel_base) {
      rel_base_acc += *rel_base;
      ++rel_base_scenes;
    }
  }
  report.mean_iou = iou_acc / static_cast<double>(scenes.size());
  report.relation_defined = rel_scenes > 0;
  if (rel_scenes > 0)
    report.relation_score = rel_acc / static_cast<double>(rel_scenes);
  if (rel_base_scenes > 0)
    report.relation_score_base =
        rel_base_acc / static_cast<double>(rel_base_scenes);
  return report;
}

}  // namespace sglayout
