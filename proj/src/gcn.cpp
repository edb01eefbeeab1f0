#include "sglayout/gcn.hpp"

#include <string>

#include "sglayout/errors.hpp"

namespace sglayout {

GraphOnTape embed_graph(ad::Tape& tape, const SceneGraph& g,
                        const ModelParams& params) {
  const int d = params.gcn.embed_dim;
  const int n = g.n_nodes();
  const auto& obj_table = params.seg("object_table");
  const auto& pred_table = params.seg("predicate_table");

  GraphOnTape out;
  out.node_ids.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int cat = g.node_categories[i];
    if (cat < 0 || cat >= params.n_categories)
      throw DataError("embed_graph: node category out of range");
    out.node_ids.push_back(
        tape.param_slice(obj_table.offset + static_cast<std::size_t>(cat) * d, d));
  }
  out.pred_ids.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    if (e.predicate < 0 || e.predicate >= params.n_predicates)
      throw DataError("embed_graph: edge predicate out of range");
    out.pred_ids.push_back(tape.param_slice(
        pred_table.offset + static_cast<std::size_t>(e.predicate) * d, d));
  }

  for (int l = 0; l < params.gcn.n_layers; ++l) {
    const std::string base = "layer" + std::to_string(l) + ".";
    const std::size_t e1w = params.offset(base + "edge1.w");
    const std::size_t e1b = params.offset(base + "edge1.b");
    const std::size_t e2w = params.offset(base + "edge2.w");
    const std::size_t e2b = params.offset(base + "edge2.b");
    const std::size_t nw = params.offset(base + "node.w");
    const std::size_t nb = params.offset(base + "node.b");

    // Candidate vectors each node receives, in ascending edge order.
    std::vector<std::vector<int>> received(n);
    std::vector<int> new_pred_ids;
    new_pred_ids.reserve(g.edges.size());
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const auto& e = g.edges[ei];
      const int t = tape.concat({out.node_ids[e.subject], out.pred_ids[ei],
                                 out.node_ids[e.object]});
      const int hidden = tape.relu(tape.affine(e1w, e1b, params.gcn.hidden_dim, t));
      const int cand = tape.affine(e2w, e2b, 3 * d, hidden);
      received[e.subject].push_back(tape.slice(cand, 0, d));
      new_pred_ids.push_back(tape.slice(cand, d, d));
      received[e.object].push_back(tape.slice(cand, 2 * d, d));
    }

    std::vector<int> new_node_ids(n);
    for (int i = 0; i < n; ++i) {
      if (received[i].empty()) {
        new_node_ids[i] = out.node_ids[i];
        continue;
      }
      const int pooled = tape.mean(received[i]);
      new_node_ids[i] = tape.relu(tape.affine(nw, nb, d, pooled));
    }
    out.node_ids = std::move(new_node_ids);
    out.pred_ids = std::move(new_pred_ids);
  }
  return out;
}

std::vector<std::vector<double>> object_embeddings(const SceneGraph& g,
                                                   const ModelParams& params) {
  ad::Tape tape(params.values);
  const GraphOnTape handles = embed_graph(tape, g, params);
  std::vector<std::vector<double>> rows;
  rows.reserve(handles.node_ids.size());
  for (const int id : handles.node_ids) rows.push_back(tape.value(id));
  return rows;
}

}  // namespace sglayout
