#pragma once

#include <span>
#include <vector>

#include "sglayout/core.hpp"
#include "sglayout/gcn.hpp"
#include "sglayout/model.hpp"
#include "sglayout/tape.hpp"

namespace sglayout {

struct LossWeights {
  double w_box = 1.0;
  double w_mask = 1.0;
  double w_tmask = 1.0;
  double w_superbox = 1.0;
};

struct LayoutPrediction {
  // Per object.
  std::vector<Box> boxes;
  std::vector<std::vector<double>> mask_probs;  // M_o x M_o, row-major
  // Per edge; triplet mask probabilities are cell-major with 3 class slots
  // per cell (background, subject, object).
  std::vector<std::vector<double>> tmask_probs;
  std::vector<Box> superboxes;
  int object_mask_side = 0;
  int triplet_mask_side = 0;
};

// Concatenation in subject, predicate, object order.
std::vector<double> triplet_embed(std::span<const double> v_s,
                                  std::span<const double> v_p,
                                  std::span<const double> v_o);

// Logistic-squashed (cx, cy, w, h) -> corner box clamped to the canvas and
// inflated by 1e-4 if clamping collapsed a side.
Box decode_box(const double raw[4]);

// Object box head applied to a single embedding.
Box predict_box(std::span<const double> embedding, const ModelParams& params);

// Tape handles for all head outputs of one graph.
struct SceneOnTape {
  GraphOnTape graph;
  std::vector<int> box_ids;    // box_decode output, width 4
  std::vector<int> mask_ids;   // logistic probabilities, width M_o^2
  std::vector<int> tmask_ids;  // softmax probabilities, width M_t^2 * 3
  std::vector<int> sbox_ids;   // box_decode output, width 4
};
SceneOnTape predict_on_tape(ad::Tape& tape, const SceneGraph& g,
                            const ModelParams& params,
                            bool with_triplet_heads = true);

LayoutPrediction extract_prediction(const ad::Tape& tape,
                                    const SceneOnTape& handles,
                                    const ModelParams& params);

// Full forward pass from a scene graph alone.
LayoutPrediction predict_layout(const SceneGraph& g, const ModelParams& params);

// Rasterizes subject (label 1) then object (label 2, overwriting overlap)
// onto a side x side canvas grid by cell-center membership.
MaskGrid gt_triplet_mask(const Box& s_box, const MaskGrid& s_mask,
                         const Box& o_box, const MaskGrid& o_mask, int side);

double loss_box(const Box& pred, const Box& gt);  // mean squared over coords
double loss_mask(const std::vector<double>& probs, const MaskGrid& gt);
double loss_triplet_mask(const std::vector<double>& probs, const MaskGrid& gt);
double loss_superbox(const Box& pred, const Box& gt_s, const Box& gt_o);

// w_box*mean(box) + w_mask*mean(mask) + w_tmask*mean(tmask)
// + w_superbox*mean(superbox); triplet terms are 0 for edgeless graphs.
double total_loss(const LayoutPrediction& pred, const Scene& scene,
                  const SceneGraph& g, const LossWeights& w);

// Same objective recorded on the tape; returns the scalar loss node.
// Heads whose weight is zero are skipped entirely.
int scene_loss_on_tape(ad::Tape& tape, const SceneGraph& g, const Scene& scene,
                       const ModelParams& params, const LossWeights& w);

}  // namespace sglayout
