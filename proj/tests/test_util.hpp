#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sglayout/core.hpp"
#include "sglayout/graphbuild.hpp"
#include "sglayout/model.hpp"
#include "sglayout/rng.hpp"

namespace testutil {

using namespace sglayout;

// Guarded relative error for gradient checks; the floor keeps near-zero
// coordinates from amplifying finite-difference roundoff.
inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

inline Box random_box(Rng& rng, double min_side = 0.08, double max_side = 0.5) {
  const double w = rng.uniform(min_side, max_side);
  const double h = rng.uniform(min_side, max_side);
  const double x0 = rng.uniform(0.0, 1.0 - w);
  const double y0 = rng.uniform(0.0, 1.0 - h);
  return Box{x0, y0, x0 + w, y0 + h};
}

inline Scene random_scene(Rng& rng, int n_objects, int n_categories,
                          int mask_side = 4) {
  Scene s;
  for (int i = 0; i < n_objects; ++i) {
    ObjectInstance obj;
    obj.category = static_cast<int>(rng.uniform_below(n_categories));
    obj.box = random_box(rng, 0.16, 0.5);
    obj.mask = MaskGrid::filled(mask_side, 1);
    if (rng.uniform_below(2) == 0) obj.mask.at(0, 0) = 0;  // non-rectangular
    s.objects.push_back(std::move(obj));
  }
  return s;
}

inline Vocab test_vocab(int n_categories) {
  std::vector<std::string> names;
  names.reserve(n_categories);
  for (int i = 0; i < n_categories; ++i)
    names.push_back("cat" + std::to_string(i));
  return Vocab::make(std::move(names));
}

inline ModelParams small_params(int n_categories, int embed_dim, int hidden_dim,
                                int n_layers, int object_mask_side,
                                int triplet_mask_side, double init_scale,
                                std::uint64_t seed) {
  GcnConfig gcn;
  gcn.embed_dim = embed_dim;
  gcn.hidden_dim = hidden_dim;
  gcn.n_layers = n_layers;
  gcn.init_scale = init_scale;
  gcn.seed = seed;
  HeadConfig heads;
  heads.object_mask_side = object_mask_side;
  heads.triplet_mask_side = triplet_mask_side;
  return init_params(gcn, heads, test_vocab(n_categories));
}

}  // namespace testutil
