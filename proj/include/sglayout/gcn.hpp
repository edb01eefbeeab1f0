#pragma once

#include <vector>

#include "sglayout/model.hpp"
#include "sglayout/tape.hpp"

namespace sglayout {

// Tape handles produced by the embedding forward pass.
struct GraphOnTape {
  std::vector<int> node_ids;  // one per graph node, width D
  std::vector<int> pred_ids;  // one per edge, width D
};

// Initial vectors come from the embedding tables; n_layers rounds of message
// passing follow. Per edge (s,p,o) the edge MLP maps concat(v_s, v_p, v_o)
// to three candidate vectors; the middle one becomes the edge's new
// predicate vector, and each node's update is the node MLP applied to the
// mean of the candidates it receives (ascending edge index). Nodes with no
// incident edges keep their input vector.
GraphOnTape embed_graph(ad::Tape& tape, const SceneGraph& g,
                        const ModelParams& params);

// Convenience forward pass; returns the final object embeddings as values.
std::vector<std::vector<double>> object_embeddings(const SceneGraph& g,
                                                   const ModelParams& params);

}  // namespace sglayout
