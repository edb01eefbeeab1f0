#include "sglayout/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "sglayout/errors.hpp"

namespace sglayout {

namespace {
constexpr double kProbEps = 1e-7;
constexpr double kDegenerateEps = 1e-4;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_prob(double p) {
  return std::min(1.0 - kProbEps, std::max(kProbEps, p));
}

// Repairs a clamped corner box whose sides collapsed to length < eps.
Box repair_box(double x0, double y0, double x1, double y1) {
  if (x1 - x0 < kDegenerateEps) {
    const double mid = 0.5 * (x0 + x1);
    x0 = std::min(std::max(0.0, mid - kDegenerateEps / 2.0), 1.0 - kDegenerateEps);
    x1 = x0 + kDegenerateEps;
  }
  if (y1 - y0 < kDegenerateEps) {
    const double mid = 0.5 * (y0 + y1);
    y0 = std::min(std::max(0.0, mid - kDegenerateEps / 2.0), 1.0 - kDegenerateEps);
    y1 = y0 + kDegenerateEps;
  }
  return Box{x0, y0, x1, y1};
}

Box box_from_values(const std::vector<double>& v) {
  return repair_box(v[0], v[1], v[2], v[3]);
}
}  // namespace

std::vector<double> triplet_embed(std::span<const double> v_s,
                                  std::span<const double> v_p,
                                  std::span<const double> v_o) {
  std::vector<double> out;
  out.reserve(v_s.size() + v_p.size() + v_o.size());
  out.insert(out.end(), v_s.begin(), v_s.end());
  out.insert(out.end(), v_p.begin(), v_p.end());
  out.insert(out.end(), v_o.begin(), v_o.end());
  return out;
}

Box decode_box(const double raw[4]) {
  const double cx = sigmoid(raw[0]), cy = sigmoid(raw[1]);
  const double w = sigmoid(raw[2]), h = sigmoid(raw[3]);
  return repair_box(clamp01(cx - w / 2.0), clamp01(cy - h / 2.0),
                    clamp01(cx + w / 2.0), clamp01(cy + h / 2.0));
}

Box predict_box(std::span<const double> embedding, const ModelParams& params) {
  const int d = params.gcn.embed_dim;
  if (static_cast<int>(embedding.size()) != d)
    throw DataError("predict_box: embedding width mismatch");
  const double* w = params.seg_data("box_head.w");
  const double* b = params.seg_data("box_head.b");
  double raw[4];
  for (int r = 0; r < 4; ++r) {
    double acc = b[r];
    for (int c = 0; c < d; ++c) acc += w[r * d + c] * embedding[c];
    raw[r] = acc;
  }
  return decode_box(raw);
}

SceneOnTape predict_on_tape(ad::Tape& tape, const SceneGraph& g,
                            const ModelParams& params,
                            bool with_triplet_heads) {
  const int d = params.gcn.embed_dim;
  const int mo = params.heads.object_mask_side;
  const int mt = params.heads.triplet_mask_side;

  SceneOnTape out;
  out.graph = embed_graph(tape, g, params);

  const std::size_t bw = params.offset("box_head.w");
  const std::size_t bb = params.offset("box_head.b");
  const std::size_t mw = params.offset("mask_head.w");
  const std::size_t mb = params.offset("mask_head.b");
  for (const int v : out.graph.node_ids) {
    out.box_ids.push_back(tape.box_decode(tape.affine(bw, bb, 4, v)));
    out.mask_ids.push_back(tape.logistic(tape.affine(mw, mb, mo * mo, v)));
  }

  if (with_triplet_heads) {
    const std::size_t tw = params.offset("tmask_head.w");
    const std::size_t tb = params.offset("tmask_head.b");
    const std::size_t sw = params.offset("sbox_head.w");
    const std::size_t sb = params.offset("sbox_head.b");
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const auto& e = g.edges[ei];
      const int t = tape.concat({out.graph.node_ids[e.subject],
                                 out.graph.pred_ids[ei],
                                 out.graph.node_ids[e.object]});
      out.tmask_ids.push_back(
          tape.softmax_rows(tape.affine(tw, tb, mt * mt * 3, t), 3));
      out.sbox_ids.push_back(tape.box_decode(tape.affine(sw, sb, 4, t)));
    }
  }
  (void)d;
  return out;
}

LayoutPrediction extract_prediction(const ad::Tape& tape,
                                    const SceneOnTape& handles,
                                    const ModelParams& params) {
  LayoutPrediction out;
  out.object_mask_side = params.heads.object_mask_side;
  out.triplet_mask_side = params.heads.triplet_mask_side;
  for (const int id : handles.box_ids)
    out.boxes.push_back(box_from_values(tape.value(id)));
  for (const int id : handles.mask_ids) out.mask_probs.push_back(tape.value(id));
  for (const int id : handles.tmask_ids)
    out.tmask_probs.push_back(tape.value(id));
  for (const int id : handles.sbox_ids)
    out.superboxes.push_back(box_from_values(tape.value(id)));
  return out;
}

LayoutPrediction predict_layout(const SceneGraph& g, const ModelParams& params) {
  ad::Tape tape(params.values);
  const SceneOnTape handles = predict_on_tape(tape, g, params, true);
  return extract_prediction(tape, handles, params);
}

MaskGrid gt_triplet_mask(const Box& s_box, const MaskGrid& s_mask,
                         const Box& o_box, const MaskGrid& o_mask, int side) {
  MaskGrid grid = MaskGrid::filled(side, 0);
  auto paint = [&](const Box& box, const MaskGrid& mask, std::uint8_t label) {
    for (int r = 0; r < side; ++r) {
      const double v = (r + 0.5) / side;
      if (v < box.y0 || v >= box.y1) continue;
      const int mr = std::min(
          mask.side - 1, static_cast<int>((v - box.y0) / box.height() * mask.side));
      for (int c = 0; c < side; ++c) {
        const double u = (c + 0.5) / side;
        if (u < box.x0 || u >= box.x1) continue;
        const int mc = std::min(
            mask.side - 1,
            static_cast<int>((u - box.x0) / box.width() * mask.side));
        if (mask.at(mr, mc)) grid.at(r, c) = label;
      }
    }
  };
  paint(s_box, s_mask, 1);
  paint(o_box, o_mask, 2);  // object wins on overlap
  return grid;
}

double loss_box(const Box& pred, const Box& gt) {
  const double d0 = pred.x0 - gt.x0;
  const double d1 = pred.y0 - gt.y0;
  const double d2 = pred.x1 - gt.x1;
  const double d3 = pred.y1 - gt.y1;
  return (d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3) / 4.0;
}

double loss_mask(const std::vector<double>& probs, const MaskGrid& gt) {
  if (probs.size() != gt.cells.size())
    throw DataError("loss_mask: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double q = clamp_prob(probs[i]);
    const double t = gt.cells[i] ? 1.0 : 0.0;
    acc += -(t * std::log(q) + (1.0 - t) * std::log(1.0 - q));
  }
  return acc / static_cast<double>(probs.size());
}

double loss_triplet_mask(const std::vector<double>& probs, const MaskGrid& gt) {
  if (probs.size() != gt.cells.size() * 3)
    throw DataError("loss_triplet_mask: shape mismatch");
  double acc = 0.0;
  for (std::size_t c = 0; c < gt.cells.size(); ++c) {
    const double q = std::max(kProbEps, probs[c * 3 + gt.cells[c]]);
    acc += -std::log(q);
  }
  return acc / static_cast<double>(gt.cells.size());
}

double loss_superbox(const Box& pred, const Box& gt_s, const Box& gt_o) {
  const Box gt = union_box(gt_s, gt_o);
  const double d0 = pred.x0 - gt.x0;
  const double d1 = pred.y0 - gt.y0;
  const double d2 = pred.x1 - gt.x1;
  const double d3 = pred.y1 - gt.y1;
  return d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
}

double total_loss(const LayoutPrediction& pred, const Scene& scene,
                  const SceneGraph& g, const LossWeights& w) {
  const std::size_t n = scene.objects.size();
  const std::size_t e = g.edges.size();
  if (pred.boxes.size() != n || pred.mask_probs.size() != n ||
      g.node_categories.size() != n)
    throw DataError("total_loss: prediction not aligned with scene");
  if (pred.tmask_probs.size() != e || pred.superboxes.size() != e)
    throw DataError("total_loss: prediction not aligned with graph edges");

  double box_acc = 0.0, mask_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obj = scene.objects[i];
    box_acc += loss_box(pred.boxes[i], obj.box);
    mask_acc += loss_mask(pred.mask_probs[i],
                          resample_mask(obj.mask, pred.object_mask_side));
  }
  double total = w.w_box * (box_acc / static_cast<double>(n)) +
                 w.w_mask * (mask_acc / static_cast<double>(n));

  if (e > 0) {
    double tmask_acc = 0.0, sbox_acc = 0.0;
    for (std::size_t ei = 0; ei < e; ++ei) {
      const auto& edge = g.edges[ei];
      const auto& s = scene.objects[edge.subject];
      const auto& o = scene.objects[edge.object];
      const MaskGrid gt = gt_triplet_mask(s.box, s.mask, o.box, o.mask,
                                          pred.triplet_mask_side);
      tmask_acc += loss_triplet_mask(pred.tmask_probs[ei], gt);
      sbox_acc += loss_superbox(pred.superboxes[ei], s.box, o.box);
    }
    total += w.w_tmask * (tmask_acc / static_cast<double>(e)) +
             w.w_superbox * (sbox_acc / static_cast<double>(e));
  }
  return total;
}

int scene_loss_on_tape(ad::Tape& tape, const SceneGraph& g, const Scene& scene,
                       const ModelParams& params, const LossWeights& w) {
  if (g.node_categories.size() != scene.objects.size())
    throw DataError("scene_loss_on_tape: graph not aligned with scene");
  const int mo = params.heads.object_mask_side;
  const int mt = params.heads.triplet_mask_side;
  const bool triplet_heads =
      (w.w_tmask > 0.0 || w.w_superbox > 0.0) && !g.edges.empty();
  const SceneOnTape handles = predict_on_tape(tape, g, params, triplet_heads);

  const std::size_t n = scene.objects.size();
  const std::size_t e = g.edges.size();
  std::vector<std::pair<double, int>> terms;

  if (w.w_box > 0.0) {
    std::vector<std::pair<double, int>> parts;
    for (std::size_t i = 0; i < n; ++i) {
      const Box& gt = scene.objects[i].box;
      parts.emplace_back(1.0 / static_cast<double>(n),
                         tape.mse(handles.box_ids[i], {gt.x0, gt.y0, gt.x1, gt.y1}));
    }
    terms.emplace_back(w.w_box, tape.add_weighted(parts));
  }
  if (w.w_mask > 0.0) {
    std::vector<std::pair<double, int>> parts;
    for (std::size_t i = 0; i < n; ++i) {
      const MaskGrid gt = resample_mask(scene.objects[i].mask, mo);
      std::vector<double> target(gt.cells.begin(), gt.cells.end());
      parts.emplace_back(1.0 / static_cast<double>(n),
                         tape.bce_mean(handles.mask_ids[i], std::move(target)));
    }
    terms.emplace_back(w.w_mask, tape.add_weighted(parts));
  }
  if (triplet_heads && w.w_tmask > 0.0) {
    std::vector<std::pair<double, int>> parts;
    for (std::size_t ei = 0; ei < e; ++ei) {
      const auto& edge = g.edges[ei];
      const auto& s = scene.objects[edge.subject];
      const auto& o = scene.objects[edge.object];
      const MaskGrid gt = gt_triplet_mask(s.box, s.mask, o.box, o.mask, mt);
      parts.emplace_back(1.0 / static_cast<double>(e),
                         tape.ce_mean(handles.tmask_ids[ei], gt.cells, 3));
    }
    terms.emplace_back(w.w_tmask, tape.add_weighted(parts));
  }
  if (triplet_heads && w.w_superbox > 0.0) {
    std::vector<std::pair<double, int>> parts;
    for (std::size_t ei = 0; ei < e; ++ei) {
      const auto& edge = g.edges[ei];
      const Box gt =
          union_box(scene.objects[edge.subject].box, scene.objects[edge.object].box);
      parts.emplace_back(1.0 / static_cast<double>(e),
                         tape.sse(handles.sbox_ids[ei], {gt.x0, gt.y0, gt.x1, gt.y1}));
    }
    terms.emplace_back(w.w_superbox, tape.add_weighted(parts));
  }
  return tape.add_weighted(terms);
}

}  // namespace sglayout
