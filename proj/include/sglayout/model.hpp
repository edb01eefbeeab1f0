#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sglayout/core.hpp"

namespace sglayout {

struct GcnConfig {
  int embed_dim = 32;
  int hidden_dim = 64;
  int n_layers = 3;
  double init_scale = 0.05;
  std::uint64_t seed = 1;
};

struct HeadConfig {
  int object_mask_side = 16;   // M_o
  int triplet_mask_side = 32;  // M_t
};

struct ParamSegment {
  std::string name;
  int rows = 0;
  int cols = 0;  // 1 for bias vectors
  std::size_t offset = 0;
  std::size_t count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
};

// Every learnable tensor of the network (embedding tables, per-layer edge
// and node MLPs, prediction heads) in one flat buffer with named segments.
// Gradients, optimizer state and checkpoints share this layout.
struct ModelParams {
  GcnConfig gcn;
  HeadConfig heads;
  int n_categories = 0;
  int n_predicates = 0;
  std::vector<ParamSegment> segments;
  std::vector<double> values;

  const ParamSegment& seg(std::string_view name) const;
  std::size_t offset(std::string_view name) const { return seg(name).offset; }
  double* seg_data(std::string_view name);
  const double* seg_data(std::string_view name) const;
};

// Weights uniform in [-init_scale, init_scale] from the seeded RNG, biases
// zero. Segment order (and so the draw order) is fixed.
ModelParams init_params(const GcnConfig& cfg, const HeadConfig& heads,
                        const Vocab& vocab);

}  // namespace sglayout
