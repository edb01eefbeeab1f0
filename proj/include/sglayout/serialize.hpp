#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "sglayout/core.hpp"
#include "sglayout/introspect.hpp"
#include "sglayout/model.hpp"
#include "sglayout/training.hpp"

namespace sglayout {

using json = nlohmann::json;

// Scene file schema:
// {"scenes":[{"objects":[{"category":"sky","box":[x0,y0,x1,y1],
//   "mask":{"side":M,"cells":[0|1,...]}}]}]}
// A missing mask is synthesized as a full-rectangle mask.
json scenes_to_json(const std::vector<Scene>& scenes, const Vocab& vocab);
std::vector<Scene> scenes_from_json(const json& doc, const Vocab& vocab);

// Graph file schema: {"graphs":[{"nodes":["sky",...],
//   "edges":[{"s":0,"p":"left of","o":1,"aug":false}]}]}
json graphs_to_json(const std::vector<SceneGraph>& graphs, const Vocab& vocab);
std::vector<SceneGraph> graphs_from_json(const json& doc, const Vocab& vocab);

// Versioned checkpoint carrying the vocab, configs and all weight segments.
// Loading validates every segment shape against the vocab and configs.
json checkpoint_to_json(const ModelParams& params, const Vocab& vocab);
ModelParams checkpoint_from_json(const json& doc, Vocab& vocab_out);

json metrics_to_json(const MetricsReport& report);
json probe_report_to_json(const ProbeReport& report, const Vocab& vocab);
json cluster_tree_to_json(const ClusterTree& tree,
                          const std::vector<std::string>& leaf_names);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& doc, const std::filesystem::path& path);

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path);
void write_distance_csv(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& dist,
                        const std::filesystem::path& path);

}  // namespace sglayout
