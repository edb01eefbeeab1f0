#include "sglayout/model.hpp"

#include <string>

#include "sglayout/errors.hpp"
#include "sglayout/rng.hpp"

namespace sglayout {

const ParamSegment& ModelParams::seg(std::string_view name) const {
  for (const auto& s : segments)
    if (s.name == name) return s;
  throw DataError("params: unknown segment '" + std::string(name) + "'");
}

double* ModelParams::seg_data(std::string_view name) {
  return values.data() + seg(name).offset;
}

const double* ModelParams::seg_data(std::string_view name) const {
  return values.data() + seg(name).offset;
}

ModelParams init_params(const GcnConfig& cfg, const HeadConfig& heads,
                        const Vocab& vocab) {
  if (cfg.embed_dim < 1 || cfg.hidden_dim < 1 || cfg.n_layers < 0)
    throw ConfigError("gcn config: dims must be >= 1, layers >= 0");
  if (heads.object_mask_side < 1 || heads.triplet_mask_side < 1)
    throw ConfigError("head config: mask sides must be >= 1");

  ModelParams p;
  p.gcn = cfg;
  p.heads = heads;
  p.n_categories = static_cast<int>(vocab.object_categories.size());
  p.n_predicates = static_cast<int>(vocab.predicates.size());

  const int d = cfg.embed_dim;
  const int h = cfg.hidden_dim;
  const int mo = heads.object_mask_side;
  const int mt = heads.triplet_mask_side;

  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    ParamSegment s{std::move(name), rows, cols, offset};
    offset += s.count();
    p.segments.push_back(std::move(s));
  };

  add("object_table", p.n_categories, d);
  add("predicate_table", p.n_predicates, d);
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string base = "layer" + std::to_string(l) + ".";
    add(base + "edge1.w", h, 3 * d);
    add(base + "edge1.b", h, 1);
    add(base + "edge2.w", 3 * d, h);
    add(base + "edge2.b", 3 * d, 1);
    add(base + "node.w", d, d);
    add(base + "node.b", d, 1);
  }
  add("box_head.w", 4, d);
  add("box_head.b", 4, 1);
  add("mask_head.w", mo * mo, d);
  add("mask_head.b", mo * mo, 1);
  add("tmask_head.w", mt * mt * 3, 3 * d);
  add("tmask_head.b", mt * mt * 3, 1);
  add("sbox_head.w", 4, 3 * d);
  add("sbox_head.b", 4, 1);

  p.values.assign(offset, 0.0);
  Rng rng(cfg.seed);
  for (const auto& s : p.segments) {
    if (s.name.ends_with(".b")) continue;  // biases stay zero
    double* data = p.values.data() + s.offset;
    for (std::size_t i = 0; i < s.count(); ++i)
      data[i] = rng.uniform(-cfg.init_scale, cfg.init_scale);
  }
  return p;
}

}  // namespace sglayout
